#include "bilayer/convergence.hpp"

#include <cmath>
#include <limits>

#include "bilayer/errors.hpp"
#include "bilayer/quadrature.hpp"

namespace bilayer {

namespace {

constexpr double kRateTolerance = 0.25;

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return num / den;
}

}  // namespace

double weak_star_gap(const PiecewiseAffineField& f, const LimitDeformation& u, const TestFunction& phi) {
  if (!(f.domain == u.domain()) || !(phi.domain() == u.domain())) {
    throw Error(ErrorKind::DomainMismatch, "field, limit and test function must share the domain");
  }
  return (gradient_pairing(f, phi) - du_pairing(u, phi)).frobenius();
}

double weak_star_gap(const StructuredField& f, const LimitDeformation& u, const TestFunction& phi) {
  if (!(f.domain == u.domain()) || !(phi.domain() == u.domain())) {
    throw Error(ErrorKind::DomainMismatch, "field, limit and test function must share the domain");
  }
  return (gradient_pairing(f, phi) - du_pairing(u, phi)).frobenius();
}

std::vector<double> dyadic_eps(int kmin, int kmax, double lambda) {
  if (kmin > kmax) throw Error(ErrorKind::InvalidInput, "empty eps sweep");
  std::vector<double> out;
  for (int k = kmin; k <= kmax; ++k) out.push_back(std::ldexp(lambda, -k));
  return out;
}

const char* to_string(Quantity q) {
  switch (q) {
    case Quantity::EEps: return "e_eps";
    case Quantity::WeakStarGap: return "weak_star_gap";
    case Quantity::GradientTV: return "gradient_tv";
    case Quantity::EDeltaEps: return "e_delta_eps";
  }
  return "?";
}

double decay_rate(const std::vector<SweepPoint>& points) {
  std::vector<double> x;
  std::vector<double> y;
  for (const SweepPoint& p : points) {
    if (!(std::abs(p.value) > 0.0)) continue;
    x.push_back(std::log(p.eps));
    y.push_back(std::log(std::abs(p.value)));
  }
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  return ls_slope(x, y);
}

SweepResult analyze_sweep(std::vector<SweepPoint> points) {
  SweepResult r;
  r.points = std::move(points);
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    if (!(r.points[i].eps < r.points[i - 1].eps)) throw Error(ErrorKind::InvalidInput, "eps must decrease strictly");
  }
  if (r.points.empty()) {
    r.extrapolated = std::numeric_limits<double>::quiet_NaN();
    r.rate = std::numeric_limits<double>::quiet_NaN();
    r.reliable = false;
    r.warnings.push_back("no successful builds");
    return r;
  }
  const SweepPoint& last = r.points.back();
  double scale = 0.0;
  for (const SweepPoint& p : r.points) scale = std::max(scale, std::abs(p.value));
  std::vector<double> x;
  std::vector<double> y;
  bool constant = true;
  for (std::size_t i = 1; i < r.points.size(); ++i) {
    const double d = std::abs(r.points[i].value - r.points[i - 1].value);
    if (d > 1e-13 * std::max(1.0, scale)) constant = false;
    if (d > 0.0) {
      x.push_back(std::log(r.points[i - 1].eps));
      y.push_back(std::log(d));
    }
  }
  if (constant) {
    r.extrapolated = last.value;
    r.rate = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.rate = x.size() >= 2 ? ls_slope(x, y) : std::numeric_limits<double>::quiet_NaN();
  if (r.points.size() >= 2) {
    const SweepPoint& prev = r.points[r.points.size() - 2];
    // First-order Richardson for arbitrary eps ratio.
    const double q = prev.eps / last.eps;
    r.extrapolated = (q * last.value - prev.value) / (q - 1.0);
  } else {
    r.extrapolated = last.value;
  }
  if (!std::isfinite(r.rate) || std::abs(r.rate - 1.0) > kRateTolerance) {
    r.reliable = false;
    r.warnings.push_back("empirical rate deviates from first order; extrapolation unreliable");
  }
  return r;
}

SweepResult sweep(const FieldBuilderFn& build, const FieldQuantityFn& quantity, const std::vector<double>& eps_list) {
  std::vector<SweepPoint> pts;
  std::vector<std::string> warnings;
  for (double eps : eps_list) {
    try {
      const PiecewiseAffineField f = build(eps);
      pts.push_back({eps, quantity(f)});
    } catch (const Error& e) {
      warnings.push_back("eps=" + std::to_string(eps) + " skipped: " + e.what());
    }
  }
  SweepResult r = analyze_sweep(std::move(pts));
  r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
  return r;
}

SweepResult sweep(const FieldBuilderFn& build, const LimitDeformation& u, Quantity q, const std::vector<double>& eps_list,
                  const TestFunction* phi, const PenaltySpec* penalty) {
  FieldQuantityFn fn;
  switch (q) {
    case Quantity::EEps:
      fn = [](const PiecewiseAffineField& f) { return e_eps(f).value(); };
      break;
    case Quantity::GradientTV:
      fn = [](const PiecewiseAffineField& f) { return gradient_total_variation(f); };
      break;
    case Quantity::WeakStarGap:
      if (phi == nullptr) throw Error(ErrorKind::InvalidInput, "weak-star sweep needs a test function");
      fn = [&u, phi](const PiecewiseAffineField& f) { return weak_star_gap(f, u, *phi); };
      break;
    case Quantity::EDeltaEps:
      if (penalty == nullptr) throw Error(ErrorKind::InvalidInput, "penalized sweep needs a penalty");
      fn = [penalty](const PiecewiseAffineField& f) { return e_delta_eps(f, *penalty).value(); };
      break;
  }
  return sweep(build, fn, eps_list);
}

const char* to_string(GapConstruction c) {
  switch (c) {
    case GapConstruction::General: return "general";
    case GapConstruction::VariantI: return "variant_i";
    case GapConstruction::VariantII: return "variant_ii";
    case GapConstruction::VariantIII: return "variant_iii";
  }
  return "?";
}

LimitDeformation gap_limit(const GapScenario& sc, GapConstruction c, double alpha, double beta) {
  const Domain2D dom{0.0, 1.0, -1.0, 1.0};
  const Vec2 e1{1.0, 0.0};
  auto d = [&](double a) { return rotation_from_angle(a) * e1; };
  switch (c) {
    case GapConstruction::General:
      return single_jump_limit(dom, sc.angle_minus, sc.angle_plus, {0.0, 0.0},
                               alpha * d(sc.angle_plus) + beta * d(sc.s_angle));
    case GapConstruction::VariantI:
      return single_jump_limit(dom, sc.angle_minus, sc.angle_plus, {0.0, 0.0},
                               alpha * d(sc.angle_plus) + beta * d(sc.angle_minus));
    case GapConstruction::VariantII:
      return single_jump_limit(dom, 0.0, 0.0, {0.0, 0.0}, alpha * e1 + beta * d(sc.s_angle));
    case GapConstruction::VariantIII:
      return single_jump_limit(dom, 0.0, 0.0, {0.0, 0.0}, alpha * e1);
  }
  throw Error(ErrorKind::InvalidInput, "unknown construction");
}

std::vector<GapRow> gap_rows(const GapScenario& sc, double alpha, double beta) {
  const std::vector<double> eps = dyadic_eps(sc.kmin, sc.kmax, sc.lambda);
  constexpr double kTol = 1e-6;
  std::vector<GapRow> rows;
  for (GapConstruction c : {GapConstruction::General, GapConstruction::VariantI, GapConstruction::VariantII,
                            GapConstruction::VariantIII}) {
    if (c == GapConstruction::VariantII && beta == 0.0) continue;
    const LimitDeformation u = gap_limit(sc, c, alpha, beta);
    FieldBuilderFn build;
    GapRow row;
    row.construction = c;
    row.alpha = alpha;
    row.beta = beta;
    switch (c) {
      case GapConstruction::General:
        build = [&](double e) { return single_jump_general(u, sc.s_angle, e, sc.lambda); };
        row.predicted = std::abs(alpha) + std::abs(beta) + 2.0;
        break;
      case GapConstruction::VariantI:
        build = [&](double e) { return single_jump_variant_i(u, sc.rho, e, sc.lambda); };
        row.predicted = std::abs(alpha) + std::abs(beta - 1.0) + 1.0;
        break;
      case GapConstruction::VariantII: {
        build = [&](double e) { return single_jump_variant_ii(u, sc.s_angle, e, sc.lambda); };
        const int iota = beta < 0.0 ? -1 : 1;
        row.predicted = std::abs(alpha - iota) + std::abs(beta) + 1.0;
        break;
      }
      case GapConstruction::VariantIII:
        if (alpha == 0.0) {
          build = [&](double e) {
            FieldBuilder fb(u.domain(), e, sc.lambda);
            fb.add_band(u.domain().a, u.domain().b, Mat2::identity(), Mat2::identity());
            return fb.finish();
          };
        } else {
          build = [&](double e) { return single_jump_variant_iii(u, e, sc.lambda); };
        }
        row.predicted = std::abs(alpha);
        break;
    }
    const SweepResult s = sweep(build, u, Quantity::EEps, eps);
    row.limit_estimate = s.extrapolated;
    row.rate = s.rate;
    row.e_limit = e_limit(u).value();
    row.gap = row.limit_estimate - row.e_limit;
    const Vec2 jump = u.psi().has_jumps() ? u.psi().jumps().front().amplitude : Vec2{0.0, 0.0};
    row.within_bound = row.e_limit <= 1.0 + norm(jump) + kTol;
    switch (c) {
      case GapConstruction::General: row.pattern_holds = row.gap >= 1.0 - kTol; break;
      case GapConstruction::VariantI:
      case GapConstruction::VariantII: row.pattern_holds = row.gap > kTol; break;
      case GapConstruction::VariantIII: row.pattern_holds = std::abs(row.gap) <= kTol; break;
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<GapRow> gap_table(const GapScenario& sc, const std::vector<double>& alphas,
                              const std::vector<double>& betas) {
  std::vector<GapRow> out;
  for (double a : alphas) {
    for (double b : betas) {
      const std::vector<GapRow> rows = gap_rows(sc, a, b);
      out.insert(out.end(), rows.begin(), rows.end());
    }
  }
  return out;
}

double slip_mass(const PiecewiseAffineField& f, const TestFunction& phi) {
  const auto& rule = quad::triangle_collapsed(6);
  double s = 0.0;
  for (const Cell& c : f.cells) s += decompose_me1(c.gradient).gamma * quad::integrate_polygon(c.polygon, rule, phi);
  return s;
}

CcMismatch cc_mismatch(const LimitDeformation& u, double s_angle, const TestFunction& phi,
                       const std::vector<double>& eps_list, double lambda) {
  const VariantIIParams p = variant_ii_params(u, s_angle);
  const SweepResult s = sweep([&](double e) { return single_jump_variant_ii(u, s_angle, e, lambda); },
                              [&](const PiecewiseAffineField& f) { return slip_mass(f, phi); }, eps_list);
  const Vec2 re1 = u.rotation().rotation_at(u.domain().a) * Vec2{1.0, 0.0};
  const SingleJumpData j = single_jump_data(u);
  CcMismatch out;
  out.slip_mass_limit = s.extrapolated;
  out.pairing_value = dot(re1, du_pairing(u, phi).col(1));
  out.mismatch = out.slip_mass_limit - out.pairing_value;
  out.predicted_mismatch = p.beta * (1.0 - dot(re1, rotation_from_angle(s_angle) * Vec2{1.0, 0.0})) *
                           phi.line_integral(j.location);
  out.rate = s.rate;
  return out;
}

}  // namespace bilayer
