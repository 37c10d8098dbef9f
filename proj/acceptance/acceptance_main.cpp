// One PASS/FAIL line per acceptance criterion. Reference values are computed
// here independently of the library's closed forms wherever possible.
//
// Exit status is 0 when every criterion passes. With --known-failures the
// status is 0 only when the failing set equals the listed set exactly, so a
// criterion that starts passing (or a new failure) is still reported.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bilayer/constructions.hpp"
#include "bilayer/convergence.hpp"
#include "bilayer/energy.hpp"
#include "bilayer/errors.hpp"
#include "bilayer/invariants.hpp"

using namespace bilayer;

namespace {

const Domain2D kDom{0.0, 1.0, -1.0, 1.0};
constexpr double kLambda = 0.5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::set<int> g_failed;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
  std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  if (!pass) g_failed.insert(id);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vec2 e1_of(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Cramer's rule for d = a u + b v.
void cramer(const Vec2& d, const Vec2& u, const Vec2& v, double& a, double& b) {
  const double det = u.x * v.y - u.y * v.x;
  a = (d.x * v.y - d.y * v.x) / det;
  b = (u.x * d.y - u.y * d.x) / det;
}

// Composite trapezoid for int_0^1 |x1 j1 + j0| dx1.
double jump_mass_trapezoid(const Vec2& j0, const Vec2& j1, int n) {
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    s += w * std::hypot(j0.x + t * j1.x, j0.y + t * j1.y);
  }
  return s / n;
}

// ---------------------------------------------------------------- 1
// Minimum over b of int_0^1 |t a + b| dt by grid search with trapezoid
// quadrature. The objective is convex, so the [-5, 5]^2 grid is searched
// coarse to fine: step 0.1 over the whole box, then steps 1e-2 and 1e-3 in
// windows of ten steps around the incumbent.
void criterion1() {
  const auto t0 = Clock::now();
  const Vec2 a{3.0, 4.0};
  const int nq = 10000;
  auto objective = [&](double bx, double by) {
    double s = 0.0;
    for (int i = 0; i <= nq; ++i) {
      const double t = static_cast<double>(i) / nq;
      const double w = (i == 0 || i == nq) ? 0.5 : 1.0;
      const double x = t * a.x + bx;
      const double y = t * a.y + by;
      s += w * std::sqrt(x * x + y * y);
    }
    return s / nq;
  };
  double best = objective(0.0, 0.0);
  double bx = 0.0;
  double by = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double half = 5.0;
  for (double step : {0.1, 1e-2, 1e-3}) {
    const int m = static_cast<int>(std::lround(half / step));
    for (int i = -m; i <= m; ++i) {
      for (int j = -m; j <= m; ++j) {
        const double x = std::clamp(cx + i * step, -5.0, 5.0);
        const double y = std::clamp(cy + j * step, -5.0, 5.0);
        const double v = objective(x, y);
        if (v < best) {
          best = v;
          bx = x;
          by = y;
        }
      }
    }
    cx = bx;
    cy = by;
    half = step;
  }
  const double closed = optimal_translation_gap(a);
  const double dt = seconds_since(t0);
  const bool pass = std::abs(closed - 1.25) <= 1e-15 && std::abs(closed - best) <= 1e-3 && dt < 1.0;
  report(1, pass, "translation bound",
         "closed form " + fmt("%.12g", closed) + ", grid minimum " + fmt("%.9f", best) + " at b=(" + fmt("%.3f", bx) +
             "," + fmt("%.3f", by) + "), " + fmt("%.3f s", dt));
}

// ---------------------------------------------------------------- 2
void criterion2() {
  const auto t0 = Clock::now();
  const double ap = kPi / 6.0;
  const double am = -kPi / 3.0;
  const double sa = kPi / 2.0;
  const Vec2 dpsi{0.3, 0.4};
  const LimitDeformation u = single_jump_limit(kDom, am, ap, {0.0, 0.0}, dpsi);
  const std::vector<double> eps = dyadic_eps(5, 11, kLambda);

  double ag = 0.0;
  double bg = 0.0;
  cramer(dpsi, e1_of(ap), e1_of(sa), ag, bg);
  double ai = 0.0;
  double bi = 0.0;
  cramer(dpsi, e1_of(ap), e1_of(am), ai, bi);
  const double want_general = std::abs(ag) + std::abs(bg) + 2.0;
  const double want_variant = std::abs(ai) + std::abs(bi - 1.0) + 1.0;

  const SweepResult sg = sweep([&](double e) { return single_jump_general(u, sa, e, kLambda); }, u, Quantity::EEps, eps);
  const SweepResult si = sweep([&](double e) { return single_jump_variant_i(u, 0.5, e, kLambda); }, u, Quantity::EEps,
                               eps);
  const Vec2 j1 = e1_of(ap) - e1_of(am);
  const double eu = jump_mass_trapezoid(dpsi, j1, 200000);
  const double eu_lib = e_limit(u).value();
  const double dt = seconds_since(t0);

  const bool values = std::abs(sg.extrapolated - want_general) <= 1e-3 && std::abs(si.extrapolated - want_variant) <= 1e-3;
  // General: limit = |a|+|b|+2 > |a|+|b|+1 >= 1+|dpsi| >= E(u).
  const double djump = std::hypot(dpsi.x, dpsi.y);
  const bool general_chain = sg.extrapolated > std::abs(ag) + std::abs(bg) + 1.0 + 0.5 &&
                             std::abs(ag) + std::abs(bg) + 1.0 >= 1.0 + djump - 1e-12 && 1.0 + djump >= eu;
  // Variant (i): the bound used depends on which side of 1/2 and 1 beta falls.
  double variant_bound = 0.0;
  if (bi < 0.5) {
    variant_bound = 1.0 + djump;
  } else if (bi < 1.0) {
    variant_bound = 1.0 + std::abs(ai) + bi * (bi - 1.0);
  } else {
    variant_bound = std::abs(ai) + bi;
  }
  const bool variant_chain = eu <= variant_bound && variant_bound <= want_variant && si.extrapolated > eu + 1e-3;
  const bool pattern = general_chain && variant_chain && std::abs(eu - eu_lib) <= 1e-7;
  report(2, values && pattern && dt < 5.0, "gap table",
         "general " + fmt("%.9f", sg.extrapolated) + " vs " + fmt("%.9f", want_general) + ", variant (i) " +
             fmt("%.9f", si.extrapolated) + " vs " + fmt("%.9f", want_variant) + ", E(u) " + fmt("%.9f", eu) +
             " (library " + fmt("%.9f", eu_lib) + "), variant beta " + fmt("%.4f", bi) + " bound " +
             fmt("%.6f", variant_bound) + ", margins " + fmt("%.4f", sg.extrapolated - eu) + " / " +
             fmt("%.4f", si.extrapolated - eu) + ", " + fmt("%.2f s", dt));
}

// ---------------------------------------------------------------- 3
void criterion3() {
  const LimitDeformation u = single_jump_limit(kDom, 0.0, 0.0, {0.0, 0.0}, {0.7, 0.0});
  const double el = e_limit(u).value();
  double worst = std::abs(el - 0.7);
  for (double eps : dyadic_eps(3, 11, kLambda)) {
    const PiecewiseAffineField f = single_jump_variant_iii(u, eps, kLambda);
    worst = std::max(worst, std::abs(e_eps(f).value() - 0.7));
  }
  report(3, worst <= 1e-12, "exact recovery",
         "e_limit " + fmt("%.17g", el) + ", worst |e_eps - 0.7| over k=3..11 " + fmt("%.3e", worst));
}

// ---------------------------------------------------------------- 4
struct Builder {
  std::string name;
  LimitDeformation u;
  FieldBuilderFn build;
};

std::vector<Builder> weak_star_builders() {
  std::vector<Builder> out;
  const LimitDeformation ug = single_jump_limit(kDom, -kPi / 3.0, kPi / 6.0, {0.0, 0.0}, {0.3, 0.4});
  out.push_back({"general", ug, [ug](double e) { return single_jump_general(ug, kPi / 2.0, e, kLambda); }});
  out.push_back({"variant_i", ug, [ug](double e) { return single_jump_variant_i(ug, 0.5, e, kLambda); }});
  const LimitDeformation u2 = single_jump_limit(kDom, 0.0, 0.0, {0.0, 0.0}, {0.2, 0.5});
  out.push_back({"variant_ii", u2, [u2](double e) { return single_jump_variant_ii(u2, kPi / 2.0, e, kLambda); }});
  const LimitDeformation um(kDom, RotationProfile1D(-1.0, 1.0, {{-1.0, 0.25, 0.0}, {0.25, 1.0, 0.7}}),
                            BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}},
                                         {{-0.5, {0.3, 0.1}}, {0.25, {-0.2, 0.4}}}));
  out.push_back({"multi_jump", um, [um](double e) { return multi_jump(um, e, kLambda); }});
  const double r = 0.2;
  const Vec2 re1 = e1_of(r);
  const LimitDeformation up(kDom, RotationProfile1D::constant(-1.0, 1.0, r),
                            BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 0.0, 1.0}, {-1.0 * re1, {0.0, 0.0}, 0.5 * re1}},
                                         {{0.5, 0.3 * re1}}));
  out.push_back({"parallel", up, [up](double e) { return parallel_recovery(up, e, kLambda); }});
  return out;
}

void criterion4() {
  const std::vector<double> eps = dyadic_eps(5, 9, kLambda);
  bool pass = true;
  double rmin = 1e9;
  double rmax = -1e9;
  double gmax = 0.0;
  std::string worst;
  std::string out_of_window;
  double shift_rmin = 1e9;
  double shift_rmax = -1e9;
  for (const Builder& b : weak_star_builders()) {
    std::vector<PiecewiseAffineField> fields;
    for (double e : eps) fields.push_back(b.build(e));
    auto run = [&](const TestFunction& phi) {
      std::vector<SweepPoint> pts;
      for (std::size_t k = 0; k < eps.size(); ++k) pts.push_back({eps[k], weak_star_gap(fields[k], b.u, phi)});
      return pts;
    };
    for (const TestFunction& phi : default_battery(kDom)) {
      const std::vector<SweepPoint> pts = run(phi);
      const double rate = decay_rate(pts);
      const double extrap = std::abs(analyze_sweep(pts).extrapolated);
      rmin = std::min(rmin, rate);
      rmax = std::max(rmax, rate);
      if (extrap > gmax) {
        gmax = extrap;
        worst = b.name + "/" + phi.name();
      }
      const bool ok = rate >= 0.8 && rate <= 1.2 && extrap <= 1e-6;
      if (!ok) {
        if (!out_of_window.empty()) out_of_window += ", ";
        out_of_window += b.name + "/" + phi.name() + " " + fmt("%.3f", rate);
      }
      pass = pass && ok;
    }
    const double rs = decay_rate(run(shifted_battery(kDom)[2]));
    shift_rmin = std::min(shift_rmin, rs);
    shift_rmax = std::max(shift_rmax, rs);
  }
  report(4, pass, "weak-star certification",
         "5 builders x 3 test functions, orders in [" + fmt("%.4f", rmin) + ", " + fmt("%.4f", rmax) +
             "], largest extrapolated gap " + fmt("%.3e", gmax) + " (" + worst + ")" +
             (out_of_window.empty() ? std::string() : "; outside [0.8, 1.2]: " + out_of_window));
  std::printf("       info: q = (1 + x2)^2 test function orders in [%.4f, %.4f]\n", shift_rmin, shift_rmax);
}

// ---------------------------------------------------------------- 5
void criterion5() {
  const LimitDeformation u(kDom, RotationProfile1D::constant(-1.0, 1.0, 0.0),
                           BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}},
                                        {{-0.4, {0.3, 0.0}}, {0.4, {0.5, 0.0}}}));
  const double eps = std::ldexp(kLambda, -9);
  const double tv = gradient_total_variation(multi_jump(u, eps, kLambda));
  // |Du| = |grad u| |Omega| + jump masses = sqrt(2) * 2 + 0.3 + 0.5.
  const double du = std::sqrt(2.0) * 2.0 + 0.8;
  const double diff = std::abs(tv - (du + 4.0));
  report(5, diff <= 5e-2, "two-jump total variation",
         "eps " + fmt("%.6g", eps) + ", grad_tv " + fmt("%.6f", tv) + ", |Du|+4 " + fmt("%.6f", du + 4.0) +
             ", difference " + fmt("%.3e", diff));

  const LimitDeformation ur(kDom, RotationProfile1D(-1.0, 1.0, {{-1.0, -0.4, 0.0}, {-0.4, 0.4, 0.6}, {0.4, 1.0, 0.0}}),
                            BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}}));
  const double tvr = gradient_total_variation(multi_jump(ur, eps, kLambda));
  const double dur = std::sqrt(2.0) * 2.0 + jump_mass(ur);
  std::printf("       info: rotation jumps (0 -> 0.6 -> 0): grad_tv %.6f vs |Du|+4 %.6f, difference %.3e\n", tvr,
              dur + 4.0, tvr - dur - 4.0);
}

// ---------------------------------------------------------------- 6
void criterion6() {
  const LimitDeformation u(kDom, RotationProfile1D::constant(-1.0, 1.0, 0.0),
                           BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{-1.0, 0.0}, {1.0, 0.0}}}, {},
                                        Staircase{10, {0.5, 0.0}, 0.0, 1.0}));
  PenaltySpec pen;
  pen.delta = 0.1;
  pen.p = 3.0;
  const SweepResult s = sweep([&](double e) { return parallel_recovery(u, e, kLambda); }, u, Quantity::EDeltaEps,
                              dyadic_eps(5, 9, kLambda), nullptr, &pen);
  // int |theta'| over Omega = 2, staircase mass 0.5 (no truncation loss), penalty 0.1 * 2.
  const double want = 2.0 + 0.5 + 0.2;
  const double lib = e_delta_limit(u, pen).value();
  const LimitDeformation ug = single_jump_limit(kDom, -kPi / 3.0, kPi / 6.0, {0.0, 0.0}, {0.3, 0.4});
  const bool inf = !e_delta_eps(single_jump_general(ug, kPi / 2.0, 1.0 / 64.0, kLambda), pen).is_finite();
  const double diff = std::abs(s.extrapolated - want);
  report(6, diff <= 1e-4 && std::abs(lib - want) <= 1e-12 && inf, "penalized limit",
         "extrapolated " + fmt("%.12f", s.extrapolated) + " vs " + fmt("%.3f", want) + " (library limit " +
             fmt("%.12f", lib) + "), gadget field with jumping first column reports " + (inf ? "+inf" : "a finite value"));
}

// ---------------------------------------------------------------- 7
void criterion7() {
  const LimitDeformation u = single_jump_limit(kDom, 0.0, 0.0, {0.0, 0.0}, {0.2, 0.5});
  // I0 = int_0^1 x1 (1 - x1) q(x1, 0) dx1 times (0 + 1)(1 - 0).
  const double i0[3] = {1.0 / 6.0, 1.0 / 12.0, 0.0};
  const std::vector<TestFunction> bat = default_battery(kDom);
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    const CcMismatch m = cc_mismatch(u, kPi / 2.0, bat[k], dyadic_eps(5, 11, kLambda), kLambda);
    worst = std::max({worst, std::abs(m.slip_mass_limit - 0.7 * i0[k]), std::abs(m.pairing_value - 0.2 * i0[k]),
                      std::abs(m.mismatch - 0.5 * i0[k])});
  }
  report(7, worst <= 1e-4, "compensated-compactness mismatch",
         "largest deviation from (0.7, 0.2, 0.5) I0 over three bumps " + fmt("%.3e", worst));
}

// ---------------------------------------------------------------- 8
void criterion8() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (const PropertyResult& r : run_property_suite(20240601, 1000)) {
    pass = pass && r.pass() && r.instances == 1000;
    if (!detail.empty()) detail += "; ";
    detail += r.name + " " + std::to_string(r.instances - r.failures) + "/" + std::to_string(r.instances);
    if (!r.first_failure.empty()) detail += " (" + r.first_failure + ")";
  }
  const double dt = seconds_since(t0);
  report(8, pass && dt < 60.0, "property suites", detail + "; " + fmt("%.2f s", dt));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria for the bilayer library"};
  std::vector<int> known;
  app.add_option("--known-failures", known, "Criteria expected to fail, with the analysis recorded in the README");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                    criterion5, criterion6, criterion7, criterion8};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, "criterion", std::string("threw: ") + e.what());
    }
  }
  const std::set<int> expected(known.begin(), known.end());
  if (!expected.empty()) {
    for (int id : expected) {
      if (!g_failed.count(id)) std::printf("unexpected pass: criterion %d is listed as a known failure\n", id);
    }
    for (int id : g_failed) {
      if (!expected.count(id)) std::printf("unexpected failure: criterion %d\n", id);
    }
  }
  return g_failed == expected ? 0 : 1;
}
