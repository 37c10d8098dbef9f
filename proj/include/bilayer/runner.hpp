#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bilayer/convergence.hpp"
#include "bilayer/errors.hpp"
#include "bilayer/fields.hpp"
#include "bilayer/scenario.hpp"

namespace bilayer {

struct RunOptions {
  std::optional<int> eps_kmax;
  bool svg = false;
  bool parallel = true;
};

struct RunRow {
  double eps = 0.0;
  std::optional<double> e_eps;
  std::optional<double> e_eps_intrinsic;
  std::optional<double> e_limit;
  std::optional<double> e_delta_eps;  // may be +inf
  std::optional<double> grad_tv;
  std::vector<double> ws_gaps;
  std::optional<double> gap;
};

struct CcRow {
  std::string phi;
  double i0 = 0.0;
  CcMismatch value;
};

struct RunReport {
  std::string scenario;
  std::string construction;
  std::vector<RunRow> rows;
  SweepResult energy_sweep;
  std::optional<double> predicted;
  std::vector<CcRow> cc_rows;
  std::string csv;
  std::string cc_csv;
  std::string svg;
  std::vector<std::string> warnings;
};

// Maps an error to the process exit status: 2 parse, 3 precondition, 4 invariant or build failure.
int exit_code_for(ErrorKind kind);

// Rethrows construction-level violations as PreconditionError.
void check_preconditions(const Scenario& s, const LimitDeformation& u);

// Closed-form limit of e_eps for the construction, if one is known.
std::optional<double> predicted_limit(const Scenario& s, const LimitDeformation& u);

// Builds the scenario's field at one eps.
PiecewiseAffineField build_field(const Scenario& s, const LimitDeformation& u, double eps);

// Throws Error(BuildError) when the field violates admissibility, continuity or compatibility at 1e-10.
void recheck_field(const PiecewiseAffineField& f);

RunReport run_scenario(const Scenario& s, const RunOptions& opt = {});

std::string format_number(double v);
std::string render_svg(const PiecewiseAffineField& f);

}  // namespace bilayer
