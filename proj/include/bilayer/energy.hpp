#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bilayer/fields.hpp"
#include "bilayer/limits.hpp"

namespace bilayer {

struct PenaltySpec {
  double delta = 0.1;
  double p = 3.0;

  void validate() const;
};

class EnergyValue {
 public:
  static EnergyValue finite(std::vector<std::pair<std::string, double>> parts);
  static EnergyValue infinite(std::string reason);

  bool is_finite() const { return finite_; }
  // +inf when infinite.
  double value() const;
  const std::vector<std::pair<std::string, double>>& breakdown() const { return parts_; }
  double part(const std::string& name) const;
  const std::string& reason() const { return reason_; }

 private:
  bool finite_ = true;
  std::vector<std::pair<std::string, double>> parts_;
  std::string reason_;
};

EnergyValue e_eps(const PiecewiseAffineField& f);
EnergyValue e_eps_intrinsic(const PiecewiseAffineField& f);
EnergyValue e_limit(const LimitDeformation& u);
EnergyValue e_delta_eps(const PiecewiseAffineField& f, const PenaltySpec& spec);
EnergyValue e_delta_limit(const LimitDeformation& u, const PenaltySpec& spec);

// Largest jump of F e1 across an interior edge.
double first_column_jump(const PiecewiseAffineField& f);

}  // namespace bilayer
