#include "bilayer/energy.hpp"

#include <cmath>
#include <limits>

#include "bilayer/errors.hpp"
#include "bilayer/quadrature.hpp"

namespace bilayer {

namespace {

constexpr double kAdmissibleTol = 1e-9;
constexpr double kColumnJumpTol = 1e-9;

}  // namespace

void PenaltySpec::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::InvalidInput, "penalty weight must be positive");
  if (!(p > 2.0) || !std::isfinite(p)) throw Error(ErrorKind::InvalidInput, "penalty exponent must exceed 2");
}

EnergyValue EnergyValue::finite(std::vector<std::pair<std::string, double>> parts) {
  EnergyValue v;
  v.parts_ = std::move(parts);
  return v;
}

EnergyValue EnergyValue::infinite(std::string reason) {
  EnergyValue v;
  v.finite_ = false;
  v.reason_ = std::move(reason);
  return v;
}

double EnergyValue::value() const {
  if (!finite_) return std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (const auto& [name, x] : parts_) s += x;
  return s;
}

double EnergyValue::part(const std::string& name) const {
  for (const auto& [n, x] : parts_)
    if (n == name) return x;
  return 0.0;
}

EnergyValue e_eps(const PiecewiseAffineField& f) {
  if (!validate_admissibility(f, kAdmissibleTol).pass) return EnergyValue::infinite("field is not admissible");
  double s = 0.0;
  for (const Cell& c : f.cells) s += std::abs(decompose_me1(c.gradient).gamma) * c.area();
  return EnergyValue::finite({{"slip", s}});
}

EnergyValue e_eps_intrinsic(const PiecewiseAffineField& f) {
  if (!validate_admissibility(f, kAdmissibleTol).pass) return EnergyValue::infinite("field is not admissible");
  double s = 0.0;
  for (const Cell& c : f.cells) s += std::sqrt(std::max(0.0, intrinsic_slip_squared(c.gradient))) * c.area();
  return EnergyValue::finite({{"slip", s}});
}

EnergyValue e_limit(const LimitDeformation& u) {
  if (!u.in_class_a()) throw Error(ErrorKind::WrongClass, "limit energy is defined on class A only");
  const Domain2D& dom = u.domain();
  const PiecewiseLinear& ac = u.psi().ac();
  double slip = 0.0;
  for (std::size_t k = 0; k < ac.pieces(); ++k) {
    const Vec2 slope = ac.slope_on(k);
    for (const RotationPiece& p : u.rotation().pieces()) {
      const double lo = std::max(p.lo, ac.t[k]);
      const double hi = std::min(p.hi, ac.t[k + 1]);
      if (!(hi > lo)) continue;
      slip += std::abs(dot(slope, rotation_from_angle(p.angle) * Vec2{1.0, 0.0})) * (hi - lo) * dom.width();
    }
  }
  double jump = 0.0;
  // jump_trace refuses staircases, so measure the jump lines on a copy without one.
  if (u.psi().has_staircase()) {
    const LimitDeformation jumps_only(dom, u.rotation(),
                                      BVFunction1D(dom.a, dom.b, u.psi().ac(), u.psi().jumps()));
    jump = jump_mass(jumps_only);
  } else {
    jump = jump_mass(u);
  }
  const double cantor = dom.width() * u.psi().staircase_variation();
  return EnergyValue::finite({{"slip", slip}, {"jump", jump}, {"cantor", cantor}});
}

double first_column_jump(const PiecewiseAffineField& f) {
  double m = 0.0;
  for (const Adjacency& adj : f.adjacency) {
    m = std::max(m, norm(f.cells[adj.i].gradient.col(0) - f.cells[adj.j].gradient.col(0)));
  }
  return m;
}

EnergyValue e_delta_eps(const PiecewiseAffineField& f, const PenaltySpec& spec) {
  spec.validate();
  const EnergyValue base = e_eps(f);
  if (!base.is_finite()) return base;
  if (first_column_jump(f) > kColumnJumpTol) {
    return EnergyValue::infinite("first gradient column jumps across an interior edge");
  }
  double lp = 0.0;
  for (const Cell& c : f.cells) lp += std::pow(norm(c.gradient.col(0)), spec.p) * c.area();
  return EnergyValue::finite({{"slip", base.value()}, {"penalty", spec.delta * lp}});
}

EnergyValue e_delta_limit(const LimitDeformation& u, const PenaltySpec& spec) {
  spec.validate();
  if (!u.is_parallel()) throw Error(ErrorKind::WrongClass, "penalized limit energy needs the parallel class");
  const EnergyValue base = e_limit(u);
  auto parts = base.breakdown();
  parts.emplace_back("penalty", spec.delta * u.domain().area());
  return EnergyValue::finite(std::move(parts));
}

}  // namespace bilayer
