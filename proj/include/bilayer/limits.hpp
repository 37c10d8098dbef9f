#pragma once

#include <vector>

#include "bilayer/algebra.hpp"
#include "bilayer/bv1d.hpp"
#include "bilayer/test_function.hpp"

namespace bilayer {

// Ordered by strength. A_PARALLEL and A_SBV_INF are not nested in general
// (a staircase is allowed in the former); classify reports A_PARALLEL when
// both hold.
enum class ClassTag { B = 0, A = 1, A_SBV_INF = 2, A_PARALLEL = 3 };

const char* to_string(ClassTag tag);

constexpr double kClassTol = 1e-10;

// u(x) = R(x2) x + psi(x2).
class LimitDeformation {
 public:
  LimitDeformation(Domain2D domain, RotationProfile1D rotation, BVFunction1D psi);

  const Domain2D& domain() const { return domain_; }
  const RotationProfile1D& rotation() const { return rotation_; }
  const BVFunction1D& psi() const { return psi_; }
  ClassTag tag() const { return tag_; }

  Vec2 operator()(const Vec2& x) const;
  // Gradient of the absolutely continuous part at height x2.
  Mat2 ac_gradient(double x2) const;

  bool in_class_a() const;
  bool is_sbv_inf() const;
  bool is_parallel() const;

 private:
  Domain2D domain_;
  RotationProfile1D rotation_;
  BVFunction1D psi_;
  ClassTag tag_;
};

ClassTag classify(const Domain2D& domain, const RotationProfile1D& rotation, const BVFunction1D& psi);
inline ClassTag classify(const LimitDeformation& u) { return classify(u.domain(), u.rotation(), u.psi()); }

struct JumpEntry {
  double a = 0.0;
  Mat2 r_minus;
  Mat2 r_plus;
  Vec2 dpsi;

  // J(x1) = (R+ - R-)(x1 e1 + a e2) + dpsi = j0 + x1 j1.
  Vec2 j0() const { return (r_plus - r_minus) * Vec2{0.0, a} + dpsi; }
  Vec2 j1() const { return (r_plus - r_minus) * Vec2{1.0, 0.0}; }
  Vec2 amplitude(double x1) const { return j0() + x1 * j1(); }
};

using JumpTrace = std::vector<JumpEntry>;

JumpTrace jump_trace(const LimitDeformation& u);

// Sum over the trace of int_c^d |J_i(x1)| dx1.
double jump_mass(const LimitDeformation& u);

Mat2 du_pairing(const LimitDeformation& u, const TestFunction& phi);

// u_eps(x) = R_eps(x2) x + psi_eps(x2) with continuous profiles.
struct StructuredField {
  Domain2D domain;
  double eps = 0.0;
  double lambda = 0.5;
  BVFunction1D angle;  // scalar profile in the x component
  BVFunction1D psi;

  Vec2 operator()(const Vec2& x) const;
  Mat2 gradient(const Vec2& x) const;
  // Sorted x2 breakpoints of both profiles inside the domain.
  std::vector<double> breakpoints() const;
};

StructuredField b_recovery(const LimitDeformation& u, double eps, double lambda);

double l1_distance(const StructuredField& f, const LimitDeformation& u);
Mat2 gradient_pairing(const StructuredField& f, const TestFunction& phi);

// Convenience constructors used by builders, scenarios and tests.
LimitDeformation single_jump_limit(const Domain2D& dom, double angle_minus, double angle_plus, const Vec2& psi_minus,
                                   const Vec2& psi_plus, double at = 0.0);

}  // namespace bilayer
