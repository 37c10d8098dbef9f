#include "bilayer/invariants.hpp"

#include <algorithm>
#include <cmath>

#include "bilayer/constructions.hpp"
#include "bilayer/energy.hpp"
#include "bilayer/errors.hpp"
#include "bilayer/runner.hpp"

namespace bilayer {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
Vec2 dir(double angle) { return {std::cos(angle), std::sin(angle)}; }

void note(PropertyResult& r, double defect, double tol, const std::string& what) {
  r.worst = std::max(r.worst, defect);
  if (!(defect <= tol)) {
    ++r.failures;
    if (r.first_failure.empty()) r.first_failure = what;
  }
}

Scenario base_scenario(ConstructionKind kind, double lambda) {
  Scenario s;
  s.name = "random";
  s.construction = kind;
  s.lambda = lambda;
  s.psi_ac = PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}};
  return s;
}

void set_single_jump(Scenario& s, double am, double ap, const Vec2& d) {
  if (am == ap) {
    s.rotation = {{-1.0, 1.0, am}};
  } else {
    s.rotation = {{-1.0, 0.0, am}, {0.0, 1.0, ap}};
  }
  s.psi_jumps = {{0.0, d}};
}

}  // namespace

BVFunction1D random_continuous_profile(std::mt19937_64& rng, double a, double b) {
  const int n = uniform_int(rng, 1, 6);
  std::vector<double> t{a, b};
  for (int i = 0; i < n; ++i) t.push_back(uniform(rng, a, b));
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  PiecewiseLinear pl;
  pl.t = t;
  for (std::size_t i = 0; i < t.size(); ++i) pl.v.push_back({uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)});
  if (uniform(rng, 0.0, 1.0) < 0.3) {
    Staircase st{uniform_int(rng, 1, 6), {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)}, a + 0.25 * (b - a),
                 b - 0.25 * (b - a)};
    return BVFunction1D(a, b, pl, {}, st).flattened();
  }
  return BVFunction1D(a, b, pl);
}

RandomInstance random_instance(std::mt19937_64& rng) {
  const int kind = uniform_int(rng, 0, 5);
  const double lambdas[3] = {0.25, 0.5, 0.75};
  double lambda = lambdas[uniform_int(rng, 0, 2)];
  if (kind == 5 && lambda == 0.75) lambda = 0.5;
  const double eps = std::ldexp(lambda, -uniform_int(rng, 3, 5));
  RandomInstance inst;
  inst.eps = eps;
  switch (kind) {
    case 0: {
      Scenario s = base_scenario(ConstructionKind::General, lambda);
      double am = 0.0;
      double ap = 0.0;
      do {
        am = uniform(rng, -kPi, kPi);
        ap = uniform(rng, -kPi, kPi);
      } while (!default_auxiliary_rotation(am, ap));
      set_single_jump(s, am, ap, {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)});
      inst.scenario = s;
      break;
    }
    case 1: {
      Scenario s = base_scenario(ConstructionKind::VariantI, lambda);
      double am = 0.0;
      double ap = 0.0;
      do {
        am = uniform(rng, -kPi, kPi);
        ap = uniform(rng, -kPi, kPi);
      } while (std::abs(std::sin(ap - am)) < 0.1);
      set_single_jump(s, am, ap, {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)});
      s.rho = uniform(rng, 0.1, 0.9);
      inst.scenario = s;
      break;
    }
    case 2: {
      Scenario s = base_scenario(ConstructionKind::VariantII, lambda);
      const double r = uniform(rng, -kPi, kPi);
      const double sa = r + uniform(rng, 0.3, kPi - 0.3) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
      const double alpha = uniform(rng, -1.5, 1.5);
      double beta = uniform(rng, 0.05, 1.5) * (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0);
      set_single_jump(s, r, r, alpha * dir(r) + beta * dir(sa));
      s.s_angle = normalize_angle(sa);
      inst.scenario = s;
      break;
    }
    case 3: {
      Scenario s = base_scenario(ConstructionKind::VariantIII, lambda);
      const double r = uniform(rng, -kPi, kPi);
      set_single_jump(s, r, r, uniform(rng, -1.5, 1.5) * dir(r));
      inst.scenario = s;
      break;
    }
    case 4: {
      Scenario s = base_scenario(ConstructionKind::MultiJump, lambda);
      const int n = uniform_int(rng, 1, 3);
      std::vector<double> locs;
      while (static_cast<int>(locs.size()) < n) {
        const double a = uniform(rng, -0.8, 0.8);
        bool ok = true;
        for (double b : locs) ok = ok && std::abs(a - b) > 0.3;
        if (ok) locs.push_back(a);
      }
      std::sort(locs.begin(), locs.end());
      std::vector<double> cuts{-1.0};
      cuts.insert(cuts.end(), locs.begin(), locs.end());
      cuts.push_back(1.0);
      std::vector<double> angles;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) angles.push_back(uniform(rng, -kPi, kPi));
      // Drop rotation changes without an admissible auxiliary rotation.
      for (std::size_t k = 1; k < angles.size(); ++k) {
        while (!default_auxiliary_rotation(angles[k - 1], angles[k])) angles[k] = uniform(rng, -kPi, kPi);
      }
      s.rotation.clear();
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) s.rotation.push_back({cuts[k], cuts[k + 1], angles[k]});
      // Shear along R e1 on each piece, so the limit stays in class A.
      PiecewiseLinear ac;
      Vec2 v{0.0, 0.0};
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        ac.t.push_back(cuts[k]);
        ac.v.push_back(v);
        v += uniform(rng, -1.0, 1.0) * (cuts[k + 1] - cuts[k]) * dir(angles[k]);
      }
      ac.t.push_back(1.0);
      ac.v.push_back(v);
      // Continuity at the jump lines: the AC part may not jump, so the kinks sit at them.
      s.psi_ac = ac;
      s.psi_jumps.clear();
      for (double a : locs) s.psi_jumps.push_back({a, {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)}});
      inst.scenario = s;
      break;
    }
    default: {
      Scenario s = base_scenario(ConstructionKind::Parallel, lambda);
      const double r = uniform(rng, -kPi, kPi);
      s.rotation = {{-1.0, 1.0, r}};
      PiecewiseLinear ac;
      std::vector<double> t{-1.0, 1.0};
      for (int i = uniform_int(rng, 0, 3); i > 0; --i) t.push_back(uniform(rng, -0.9, 0.9));
      std::sort(t.begin(), t.end());
      double theta = 0.0;
      for (std::size_t k = 0; k < t.size(); ++k) {
        ac.t.push_back(t[k]);
        ac.v.push_back(theta * dir(r));
        if (k + 1 < t.size()) theta += uniform(rng, -2.0, 2.0) * (t[k + 1] - t[k]);
      }
      s.psi_ac = ac;
      for (int i = uniform_int(rng, 0, 2); i > 0; --i) {
        const double a = uniform(rng, -0.9, 0.9);
        bool ok = true;
        for (const Jump& j : s.psi_jumps) ok = ok && a != j.location;
        if (ok) s.psi_jumps.push_back({a, uniform(rng, -1.0, 1.0) * dir(r)});
      }
      std::sort(s.psi_jumps.begin(), s.psi_jumps.end(),
                [](const Jump& x, const Jump& y) { return x.location < y.location; });
      if (uniform(rng, 0.0, 1.0) < 0.4) s.psi_staircase = Staircase{uniform_int(rng, 1, 6), uniform(rng, -1.0, 1.0) * dir(r), -0.5, 0.5};
      inst.scenario = s;
      break;
    }
  }
  return inst;
}

PropertyResult prop_decompose_roundtrip(std::uint64_t seed, std::size_t n) {
  PropertyResult r;
  r.name = "decompose/recompose round trip";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = uniform(rng, -kPi, kPi);
    const double gamma = uniform(rng, -10.0, 10.0);
    const Mat2 f = recompose(angle, gamma);
    const SlipDecomposition d = decompose_me1(f);
    const double defect = std::max({std::abs(normalize_angle(d.angle - angle)), std::abs(d.gamma - gamma),
                                    max_abs_diff(recompose(d), f)});
    note(r, defect, 1e-10, "angle " + std::to_string(angle) + ", gamma " + std::to_string(gamma));
    ++r.instances;
  }
  return r;
}

namespace {

template <class Check>
PropertyResult over_constructions(const std::string& name, std::uint64_t seed, std::size_t n, Check check) {
  PropertyResult r;
  r.name = name;
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const RandomInstance inst = random_instance(rng);
    const std::string tag = std::string(to_string(inst.scenario.construction)) + " #" + std::to_string(i);
    try {
      const LimitDeformation u = inst.scenario.limit();
      const PiecewiseAffineField f = build_field(inst.scenario, u, inst.eps);
      check(r, f, u, tag);
    } catch (const Error& e) {
      note(r, 1.0, 0.0, tag + ": " + e.what());
    }
    ++r.instances;
  }
  return r;
}

}  // namespace

PropertyResult prop_energy_identity(std::uint64_t seed, std::size_t n) {
  return over_constructions("e_eps equals the intrinsic form", seed, n,
                            [](PropertyResult& r, const PiecewiseAffineField& f, const LimitDeformation&,
                               const std::string& tag) {
                              const double a = e_eps(f).value();
                              const double b = e_eps_intrinsic(f).value();
                              note(r, std::abs(a - b), 1e-10 * std::max(1.0, a), tag);
                            });
}

PropertyResult prop_constructions_valid(std::uint64_t seed, std::size_t n) {
  return over_constructions(
      "constructions are admissible and compatible", seed, n,
      [](PropertyResult& r, const PiecewiseAffineField& f, const LimitDeformation&, const std::string& tag) {
        double defect = std::max(validate_compatibility(f), continuity_defect(f));
        if (!validate_admissibility(f, 1e-10).pass) defect = std::max(defect, 1.0);
        if (!layer_tags_consistent(f)) defect = std::max(defect, 1.0);
        for (const Cell& c : f.cells) defect = std::max(defect, std::abs(c.gradient.det() - 1.0) * 1e-2);
        note(r, defect, 1e-10, tag);
      });
}

PropertyResult prop_rotation_tv_bound(std::uint64_t seed, std::size_t n) {
  return over_constructions("rotation profile variation bound", seed, n,
                            [](PropertyResult& r, const PiecewiseAffineField& f, const LimitDeformation&,
                               const std::string& tag) {
                              const double tv = extract_rotation_profile(f).tv;
                              const double bound = 4.0 * std::sqrt(2.0) * gradient_total_variation(f);
                              note(r, std::max(0.0, tv - bound), 0.0, tag);
                            });
}

PropertyResult prop_stop_go(std::uint64_t seed, std::size_t n) {
  PropertyResult r;
  r.name = "stop-and-go preserves variation and freezes rigid layers";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = uniform(rng, 0.1, 0.9);
    const double eps = std::ldexp(1.0, -uniform_int(rng, 2, 7));
    const BVFunction1D w = random_continuous_profile(rng, -1.0, 1.0);
    const BVFunction1D g = stop_go_reparametrize(w, eps, lambda);
    double defect = std::abs(total_variation(g) - total_variation(w));
    const PiecewiseLinear& pl = g.ac();
    for (std::size_t k = 0; k < pl.pieces(); ++k) {
      const double mid = 0.5 * (pl.t[k] + pl.t[k + 1]);
      if (in_soft_layer(mid, eps, lambda)) continue;
      if (pl.v[k].x != pl.v[k + 1].x || pl.v[k].y != pl.v[k + 1].y) defect = std::max(defect, 1.0);
    }
    note(r, defect, 1e-12, "instance " + std::to_string(i));
    ++r.instances;
  }
  return r;
}

std::vector<PropertyResult> run_property_suite(std::uint64_t seed, std::size_t n) {
  return {prop_decompose_roundtrip(seed, n), prop_energy_identity(seed + 1, n), prop_constructions_valid(seed + 2, n),
          prop_rotation_tv_bound(seed + 3, n), prop_stop_go(seed + 4, n)};
}

}  // namespace bilayer
