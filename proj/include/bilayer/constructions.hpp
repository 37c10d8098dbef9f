#pragma once

#include <optional>
#include <vector>

#include "bilayer/fields.hpp"
#include "bilayer/limits.hpp"

namespace bilayer {

constexpr double kDefaultLambda = 0.5;
constexpr double kAuxTol = 1e-9;

// Data of one jump for the eight-region gadget. The jump vector is split as
// delta = alpha R+ e1 + beta S e1.
struct SingleJumpParams {
  double angle_minus = 0.0;
  double angle_plus = 0.0;
  double s_angle = 0.0;
  Vec2 delta;
  double alpha = 0.0;
  double beta = 0.0;
  double theta_plus = 0.0;   // angle of S^T R+
  double theta_minus = 0.0;  // angle of S^T R-

  static SingleJumpParams make(double angle_minus, double angle_plus, const Vec2& delta, double s_angle);

  double gamma_plus(double h) const { return 4.0 * alpha / h; }
  double gamma_minus(double h) const { return 4.0 * beta / h; }
  double mu_plus(double h) const;
  double mu_minus(double h) const;
  double mu_tilde_plus(double h) const;
  double mu_tilde_minus(double h) const;
  // Energy of the gadget band, exact once 4/h exceeds both |tan(theta/2)|.
  double predicted_limit() const;
};

// True when S satisfies the three constraints against R- and R+.
bool auxiliary_rotation_ok(double angle_minus, double angle_plus, double s_angle);
// First of angle(R+) + k pi/6, k = 1..5, that satisfies the constraints.
std::optional<double> default_auxiliary_rotation(double angle_minus, double angle_plus);

// Solve delta = a u + b v.
void solve_pair(const Vec2& delta, const Vec2& u, const Vec2& v, double& a, double& b);

struct VariantIParams {
  double rho = 0.5;
  double alpha = 0.0;  // against R+ e1
  double beta = 0.0;   // against R- e1
  double theta = 0.0;  // angle of R-^T R+
  double predicted_limit() const;
};

struct VariantIIParams {
  double s_angle = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  int iota = 1;
  double rho = 0.5;
  double theta = 0.0;  // angle of S^T R
  double predicted_limit() const;
};

struct VariantIIIParams {
  int iota = 1;
  double alpha = 0.0;
  double predicted_limit() const { return std::abs(alpha); }
};

// The single jump of u, read off its representation.
struct SingleJumpData {
  double location = 0.0;
  double angle_minus = 0.0;
  double angle_plus = 0.0;
  Vec2 dpsi;
};
SingleJumpData single_jump_data(const LimitDeformation& u);

VariantIParams variant_i_params(const LimitDeformation& u, double rho);
VariantIIParams variant_ii_params(const LimitDeformation& u, std::optional<double> s_angle = std::nullopt);
VariantIIIParams variant_iii_params(const LimitDeformation& u);

PiecewiseAffineField single_jump_general(const LimitDeformation& u, std::optional<double> s_angle, double eps,
                                         double lambda = kDefaultLambda);
PiecewiseAffineField single_jump_variant_i(const LimitDeformation& u, double rho, double eps,
                                           double lambda = kDefaultLambda);
PiecewiseAffineField single_jump_variant_ii(const LimitDeformation& u, std::optional<double> s_angle, double eps,
                                            double lambda = kDefaultLambda);
PiecewiseAffineField single_jump_variant_iii(const LimitDeformation& u, double eps, double lambda = kDefaultLambda);
PiecewiseAffineField multi_jump(const LimitDeformation& u, double eps, double lambda = kDefaultLambda);
PiecewiseAffineField parallel_recovery(const LimitDeformation& u, double eps, double lambda = kDefaultLambda);

// Auxiliary rotations chosen per jump by multi_jump.
std::vector<SingleJumpParams> multi_jump_params(const LimitDeformation& u);

}  // namespace bilayer
