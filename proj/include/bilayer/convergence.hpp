#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bilayer/constructions.hpp"
#include "bilayer/energy.hpp"
#include "bilayer/fields.hpp"
#include "bilayer/limits.hpp"
#include "bilayer/test_function.hpp"

namespace bilayer {

// Frobenius norm of int (grad f) phi - <Du, phi>.
double weak_star_gap(const PiecewiseAffineField& f, const LimitDeformation& u, const TestFunction& phi);
double weak_star_gap(const StructuredField& f, const LimitDeformation& u, const TestFunction& phi);

// eps_k = lambda 2^-k for k = kmin..kmax, strictly decreasing.
std::vector<double> dyadic_eps(int kmin, int kmax, double lambda);

enum class Quantity { EEps, WeakStarGap, GradientTV, EDeltaEps };
const char* to_string(Quantity q);

struct SweepPoint {
  double eps = 0.0;
  double value = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double extrapolated = 0.0;
  // Least-squares order of the successive differences; NaN for a constant sequence.
  double rate = 0.0;
  bool reliable = true;
  std::vector<std::string> warnings;
};

// Richardson extrapolation assuming first order, plus the empirical rate.
SweepResult analyze_sweep(std::vector<SweepPoint> points);
// Least-squares slope of log|v| against log eps, for sequences tending to 0.
double decay_rate(const std::vector<SweepPoint>& points);

using FieldBuilderFn = std::function<PiecewiseAffineField(double)>;
using FieldQuantityFn = std::function<double(const PiecewiseAffineField&)>;

// Builder errors skip that eps with a warning.
SweepResult sweep(const FieldBuilderFn& build, const FieldQuantityFn& quantity, const std::vector<double>& eps_list);
SweepResult sweep(const FieldBuilderFn& build, const LimitDeformation& u, Quantity q, const std::vector<double>& eps_list,
                  const TestFunction* phi = nullptr, const PenaltySpec* penalty = nullptr);

enum class GapConstruction { General, VariantI, VariantII, VariantIII };
const char* to_string(GapConstruction c);

struct GapRow {
  GapConstruction construction = GapConstruction::General;
  double alpha = 0.0;
  double beta = 0.0;
  double limit_estimate = 0.0;  // extrapolated lim e_eps
  double e_limit = 0.0;
  double gap = 0.0;
  double predicted = 0.0;
  double rate = 0.0;
  bool within_bound = true;     // e_limit <= 1 + |jump of psi|
  bool pattern_holds = true;    // sign of the gap as the case analysis predicts
};

struct GapScenario {
  double angle_plus = kPi / 6.0;
  double angle_minus = -kPi / 3.0;
  double s_angle = kPi / 2.0;
  double rho = 0.5;
  int kmin = 5;
  int kmax = 11;
  double lambda = kDefaultLambda;
};

// One row per construction for the jump alpha R+ e1 + beta X e1, where X is
// the construction's second direction (S, R-, S, none).
std::vector<GapRow> gap_rows(const GapScenario& sc, double alpha, double beta);
std::vector<GapRow> gap_table(const GapScenario& sc, const std::vector<double>& alphas, const std::vector<double>& betas);

// The limit deformation each gap row uses.
LimitDeformation gap_limit(const GapScenario& sc, GapConstruction c, double alpha, double beta);

struct CcMismatch {
  double slip_mass_limit = 0.0;
  double pairing_value = 0.0;
  double mismatch = 0.0;
  double predicted_mismatch = 0.0;
  double rate = 0.0;
};

// int gamma_eps phi dx over a field.
double slip_mass(const PiecewiseAffineField& f, const TestFunction& phi);

CcMismatch cc_mismatch(const LimitDeformation& u, double s_angle, const TestFunction& phi,
                       const std::vector<double>& eps_list, double lambda = kDefaultLambda);

}  // namespace bilayer
