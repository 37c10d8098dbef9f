#include "bilayer/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <sstream>

#include "bilayer/constructions.hpp"
#include "bilayer/energy.hpp"

namespace bilayer {

namespace {

constexpr double kRecheckTol = 1e-10;

std::vector<TestFunction> battery_for(const Scenario& s) {
  return s.battery == "shifted" ? shifted_battery(s.domain) : default_battery(s.domain);
}

std::string opt_num(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError: return 2;
    case ErrorKind::PreconditionError: return 3;
    default: return 4;
  }
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_preconditions(const Scenario& s, const LimitDeformation& u) {
  try {
    if (s.penalty) s.penalty->validate();
    switch (s.construction) {
      case ConstructionKind::General: {
        const SingleJumpData j = single_jump_data(u);
        if (s.s_angle) {
          SingleJumpParams::make(j.angle_minus, j.angle_plus, j.dpsi, *s.s_angle);
        } else if (!default_auxiliary_rotation(j.angle_minus, j.angle_plus)) {
          throw Error(ErrorKind::BadAuxiliaryRotation, "no admissible auxiliary rotation found");
        }
        break;
      }
      case ConstructionKind::VariantI: variant_i_params(u, s.rho); break;
      case ConstructionKind::VariantII: variant_ii_params(u, s.s_angle); break;
      case ConstructionKind::VariantIII: variant_iii_params(u); break;
      case ConstructionKind::MultiJump:
        if (!u.is_sbv_inf()) throw Error(ErrorKind::WrongClass, "multi_jump needs finitely many jumps in class A");
        multi_jump_params(u);
        break;
      case ConstructionKind::Parallel:
        if (!u.is_parallel()) throw Error(ErrorKind::WrongClass, "parallel recovery needs the parallel class");
        break;
      case ConstructionKind::BRecovery: break;
    }
    if (s.construction != ConstructionKind::BRecovery && s.construction != ConstructionKind::Parallel &&
        s.construction != ConstructionKind::VariantIII && (s.domain.c != 0.0 || s.domain.d != 1.0)) {
      throw Error(ErrorKind::InvalidInput, "jump gadgets need the x1-range (0, 1)");
    }
    const bool wants_cc = std::find(s.tables.begin(), s.tables.end(), "cc_mismatch") != s.tables.end();
    if (wants_cc && s.construction != ConstructionKind::VariantII) {
      throw Error(ErrorKind::InvalidInput, "the cc_mismatch table needs the variant_ii construction");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::PreconditionError) throw;
    throw Error(ErrorKind::PreconditionError, e.what());
  }
}

std::optional<double> predicted_limit(const Scenario& s, const LimitDeformation& u) {
  switch (s.construction) {
    case ConstructionKind::General: {
      const SingleJumpData j = single_jump_data(u);
      const double sa = s.s_angle ? *s.s_angle : *default_auxiliary_rotation(j.angle_minus, j.angle_plus);
      const Mat2 dr = rotation_from_angle(j.angle_plus) - rotation_from_angle(j.angle_minus);
      const Vec2 delta = j.dpsi + dr * Vec2{0.0, j.location};
      return e_limit(u).part("slip") + SingleJumpParams::make(j.angle_minus, j.angle_plus, delta, sa).predicted_limit();
    }
    case ConstructionKind::VariantI: {
      const SingleJumpData j = single_jump_data(u);
      const Mat2 dr = rotation_from_angle(j.angle_plus) - rotation_from_angle(j.angle_minus);
      const Vec2 delta = j.dpsi + dr * Vec2{0.0, j.location};
      VariantIParams p;
      solve_pair(delta, rotation_from_angle(j.angle_plus) * Vec2{1.0, 0.0},
                 rotation_from_angle(j.angle_minus) * Vec2{1.0, 0.0}, p.alpha, p.beta);
      return e_limit(u).part("slip") + p.predicted_limit();
    }
    case ConstructionKind::VariantII: return e_limit(u).part("slip") + variant_ii_params(u, s.s_angle).predicted_limit();
    case ConstructionKind::VariantIII: return e_limit(u).value();
    case ConstructionKind::MultiJump: {
      double v = e_limit(u).part("slip");
      for (const SingleJumpParams& p : multi_jump_params(u)) v += p.predicted_limit();
      return v;
    }
    case ConstructionKind::Parallel: return e_limit(u).value();
    case ConstructionKind::BRecovery: return std::nullopt;
  }
  return std::nullopt;
}

PiecewiseAffineField build_field(const Scenario& s, const LimitDeformation& u, double eps) {
  switch (s.construction) {
    case ConstructionKind::General: return single_jump_general(u, s.s_angle, eps, s.lambda);
    case ConstructionKind::VariantI: return single_jump_variant_i(u, s.rho, eps, s.lambda);
    case ConstructionKind::VariantII: return single_jump_variant_ii(u, s.s_angle, eps, s.lambda);
    case ConstructionKind::VariantIII: return single_jump_variant_iii(u, eps, s.lambda);
    case ConstructionKind::MultiJump: return multi_jump(u, eps, s.lambda);
    case ConstructionKind::Parallel: return parallel_recovery(u, eps, s.lambda);
    case ConstructionKind::BRecovery: break;
  }
  throw Error(ErrorKind::InvalidInput, "b_recovery produces a structured field, not a cell complex");
}

void recheck_field(const PiecewiseAffineField& f) {
  const AdmissibilityReport rep = validate_admissibility(f, kRecheckTol);
  if (!rep.pass) throw Error(ErrorKind::BuildError, "field failed the admissibility re-check");
  if (validate_compatibility(f) > kRecheckTol) throw Error(ErrorKind::BuildError, "field failed the compatibility re-check");
  if (continuity_defect(f) > kRecheckTol) throw Error(ErrorKind::BuildError, "field failed the continuity re-check");
}

namespace {

struct EpsOutcome {
  std::optional<RunRow> row;
  std::string warning;
};

EpsOutcome evaluate_eps(const Scenario& s, const LimitDeformation& u, double eps,
                        const std::vector<TestFunction>& battery) {
  EpsOutcome out;
  RunRow row;
  row.eps = eps;
  if (s.construction == ConstructionKind::BRecovery) {
    const StructuredField f = b_recovery(u, eps, s.lambda);
    for (const TestFunction& phi : battery) row.ws_gaps.push_back(weak_star_gap(f, u, phi));
    out.row = row;
    return out;
  }
  PiecewiseAffineField f = [&] {
    try {
      return build_field(s, u, eps);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::CellsCollide || e.kind() == ErrorKind::BandOverflow) throw;
      throw Error(ErrorKind::BuildError, e.what());
    }
  }();
  recheck_field(f);
  row.e_eps = e_eps(f).value();
  row.e_eps_intrinsic = e_eps_intrinsic(f).value();
  if (u.in_class_a()) {
    row.e_limit = e_limit(u).value();
    row.gap = *row.e_eps - *row.e_limit;
  }
  if (s.penalty) row.e_delta_eps = e_delta_eps(f, *s.penalty).value();
  row.grad_tv = gradient_total_variation(f);
  for (const TestFunction& phi : battery) row.ws_gaps.push_back(weak_star_gap(f, u, phi));
  out.row = row;
  return out;
}

std::string svg_polygon(const std::vector<Vec2>& pts, std::size_t index, const std::string& fill) {
  std::string s = "<polygon data-cell=\"" + std::to_string(index) + "\" fill=\"" + fill + "\" points=\"";
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k) s += ' ';
    s += format_number(pts[k].x) + "," + format_number(pts[k].y);
  }
  return s + "\"/>\n";
}

std::string slip_color(double gamma) {
  const double t = std::min(1.0, std::log1p(std::abs(gamma)) / std::log1p(1000.0));
  const int r = static_cast<int>(std::lround(247 + t * (178 - 247)));
  const int g = static_cast<int>(std::lround(251 + t * (24 - 251)));
  const int b = static_cast<int>(std::lround(255 + t * (43 - 255)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
  return buf;
}

}  // namespace

std::string render_svg(const PiecewiseAffineField& f) {
  const double panel = 400.0;
  const double margin = 20.0;
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = x0;
  double x1 = -x0;
  double y1 = -x0;
  std::vector<std::vector<Vec2>> images;
  images.reserve(f.cells.size());
  for (const Cell& c : f.cells) {
    images.push_back(c.image());
    for (const Vec2& v : images.back()) {
      x0 = std::min(x0, v.x);
      x1 = std::max(x1, v.x);
      y0 = std::min(y0, v.y);
      y1 = std::max(y1, v.y);
    }
  }
  const Domain2D& d = f.domain;
  const double sref = panel / std::max(d.width(), d.b - d.a);
  const double sdef = panel / std::max(x1 - x0, y1 - y0);
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << 2 * panel + 3 * margin
    << "\" height=\"" << panel + 2 * margin << "\">\n";
  o << "<g id=\"reference\" stroke=\"none\" transform=\"translate(" << format_number(margin - sref * d.c) << ","
    << format_number(margin + sref * d.b) << ") scale(" << format_number(sref) << "," << format_number(-sref)
    << ")\">\n";
  for (std::size_t i = 0; i < f.cells.size(); ++i) {
    o << svg_polygon(f.cells[i].polygon, i, f.cells[i].layer == Layer::Soft ? "#d9e7f5" : "#8c8c8c");
  }
  o << "</g>\n";
  o << "<g id=\"deformed\" stroke=\"none\" transform=\"translate(" << format_number(2 * margin + panel - sdef * x0)
    << "," << format_number(margin + sdef * y1) << ") scale(" << format_number(sdef) << "," << format_number(-sdef)
    << ")\">\n";
  for (std::size_t i = 0; i < f.cells.size(); ++i) {
    o << svg_polygon(images[i], i, slip_color(decompose_me1(f.cells[i].gradient).gamma));
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

RunReport run_scenario(const Scenario& s, const RunOptions& opt) {
  const LimitDeformation u = [&] {
    try {
      return s.limit();
    } catch (const Error& e) {
      throw Error(ErrorKind::ParseError, std::string("invalid limit deformation: ") + e.what());
    }
  }();
  check_preconditions(s, u);
  const int kmax = opt.eps_kmax ? *opt.eps_kmax : s.k_max;
  if (kmax < s.k_min) throw Error(ErrorKind::PreconditionError, "eps k_max below k_min");
  const std::vector<double> eps_list = dyadic_eps(s.k_min, kmax, s.lambda);
  const std::vector<TestFunction> battery = battery_for(s);

  std::vector<std::future<EpsOutcome>> futures;
  for (double eps : eps_list) {
    futures.push_back(std::async(opt.parallel ? std::launch::async : std::launch::deferred,
                                 [&s, &u, &battery, eps] { return evaluate_eps(s, u, eps, battery); }));
  }
  RunReport rep;
  rep.scenario = s.name;
  rep.construction = to_string(s.construction);
  std::optional<Error> first_error;
  for (std::size_t i = 0; i < futures.size(); ++i) {
    try {
      EpsOutcome o = futures[i].get();
      if (o.row) rep.rows.push_back(*o.row);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::CellsCollide || e.kind() == ErrorKind::BandOverflow) {
        rep.warnings.push_back("eps=" + format_number(eps_list[i]) + " skipped: " + e.what());
      } else if (!first_error) {
        first_error = e;
      }
    }
  }
  if (first_error) throw *first_error;
  if (rep.rows.empty()) throw Error(ErrorKind::BuildError, "no eps in the sweep produced a field");

  std::vector<SweepPoint> pts;
  for (const RunRow& r : rep.rows) {
    if (r.e_eps) pts.push_back({r.eps, *r.e_eps});
  }
  if (!pts.empty()) {
    rep.energy_sweep = analyze_sweep(pts);
    rep.warnings.insert(rep.warnings.end(), rep.energy_sweep.warnings.begin(), rep.energy_sweep.warnings.end());
  } else {
    rep.energy_sweep.extrapolated = std::numeric_limits<double>::quiet_NaN();
    rep.energy_sweep.rate = std::numeric_limits<double>::quiet_NaN();
    rep.energy_sweep.reliable = false;
  }
  rep.predicted = predicted_limit(s, u);

  std::ostringstream csv;
  csv << "scenario,construction,eps,e_eps,e_eps_intrinsic,e_limit,e_delta_eps,grad_tv";
  for (std::size_t k = 0; k < battery.size(); ++k) csv << ",ws_gap_phi" << k + 1;
  csv << ",rate,extrapolated,predicted,gap\n";
  const bool have_energy = !pts.empty();
  for (const RunRow& r : rep.rows) {
    csv << s.name << ',' << rep.construction << ',' << format_number(r.eps) << ',' << opt_num(r.e_eps) << ','
        << opt_num(r.e_eps_intrinsic) << ',' << opt_num(r.e_limit) << ',' << opt_num(r.e_delta_eps) << ','
        << opt_num(r.grad_tv);
    for (double g : r.ws_gaps) csv << ',' << format_number(g);
    csv << ',' << (have_energy ? format_number(rep.energy_sweep.rate) : "") << ','
        << (have_energy ? format_number(rep.energy_sweep.extrapolated) : "") << ',' << opt_num(rep.predicted) << ','
        << opt_num(r.gap) << '\n';
  }
  rep.csv = csv.str();

  if (std::find(s.tables.begin(), s.tables.end(), "cc_mismatch") != s.tables.end()) {
    const double sa = s.s_angle ? *s.s_angle : variant_ii_params(u).s_angle;
    std::ostringstream cc;
    cc << "scenario,phi,i0,slip_mass_limit,pairing,mismatch,predicted_mismatch,rate\n";
    for (const TestFunction& phi : battery) {
      CcRow row;
      row.phi = phi.name();
      row.i0 = phi.line_integral(single_jump_data(u).location);
      row.value = cc_mismatch(u, sa, phi, eps_list, s.lambda);
      cc << s.name << ',' << row.phi << ',' << format_number(row.i0) << ',' << format_number(row.value.slip_mass_limit)
         << ',' << format_number(row.value.pairing_value) << ',' << format_number(row.value.mismatch) << ','
         << format_number(row.value.predicted_mismatch) << ',' << format_number(row.value.rate) << '\n';
      rep.cc_rows.push_back(row);
    }
    rep.cc_csv = cc.str();
  }

  if (opt.svg) {
    if (s.construction == ConstructionKind::BRecovery) {
      rep.warnings.push_back("no SVG for b_recovery: the structured field has no cell complex");
    } else {
      const double eps = std::ldexp(s.lambda, -(s.svg_k ? *s.svg_k : s.k_min));
      const PiecewiseAffineField f = build_field(s, u, eps);
      recheck_field(f);
      rep.svg = render_svg(f);
    }
  }
  return rep;
}

}  // namespace bilayer
