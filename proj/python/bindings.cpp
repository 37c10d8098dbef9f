// Python bindings for the core library. Matrices cross the boundary as
// 2x2 numpy arrays and vectors as length-2 sequences.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bilayer/algebra.hpp"
#include "bilayer/constructions.hpp"
#include "bilayer/convergence.hpp"
#include "bilayer/energy.hpp"
#include "bilayer/errors.hpp"
#include "bilayer/fields.hpp"
#include "bilayer/invariants.hpp"
#include "bilayer/limits.hpp"
#include "bilayer/runner.hpp"
#include "bilayer/scenario.hpp"

namespace py = pybind11;
using namespace bilayer;

namespace {

using Pair = std::pair<double, double>;

Vec2 to_vec(const Pair& p) { return {p.first, p.second}; }
Pair from_vec(const Vec2& v) { return {v.x, v.y}; }

py::array_t<double> from_mat(const Mat2& m) {
  py::array_t<double> a({2, 2});
  auto r = a.mutable_unchecked<2>();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = m(i, j);
  return a;
}

Mat2 to_mat(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != 2 || a.shape(1) != 2) throw Error(ErrorKind::InvalidInput, "expected a 2x2 matrix");
  auto r = a.unchecked<2>();
  return {r(0, 0), r(0, 1), r(1, 0), r(1, 1)};
}

Domain2D to_domain(const std::array<double, 4>& d) { return {d[0], d[1], d[2], d[3]}; }

py::dict energy_dict(const EnergyValue& e) {
  py::dict d;
  d["finite"] = e.is_finite();
  d["value"] = e.value();
  py::dict parts;
  for (const auto& [name, v] : e.breakdown()) parts[py::str(name)] = v;
  d["parts"] = parts;
  d["reason"] = e.reason();
  return d;
}

LimitDeformation make_limit(const std::array<double, 4>& domain, const std::vector<std::tuple<double, double, double>>& rotation,
                            const std::vector<double>& ac_t, const std::vector<Pair>& ac_v,
                            const std::vector<std::pair<double, Pair>>& jumps,
                            const std::optional<std::tuple<int, Pair, double, double>>& staircase) {
  const Domain2D dom = to_domain(domain);
  std::vector<RotationPiece> pieces;
  for (const auto& [lo, hi, angle] : rotation) pieces.push_back({lo, hi, angle});
  PiecewiseLinear ac;
  if (ac_t.empty()) {
    ac = PiecewiseLinear{{dom.a, dom.b}, {{0.0, 0.0}, {0.0, 0.0}}};
  } else {
    ac.t = ac_t;
    for (const Pair& v : ac_v) ac.v.push_back(to_vec(v));
  }
  std::vector<Jump> js;
  for (const auto& [at, amp] : jumps) js.push_back({at, to_vec(amp)});
  std::optional<Staircase> st;
  if (staircase) {
    const auto& [depth, rise, c0, c1] = *staircase;
    st = Staircase{depth, to_vec(rise), c0, c1};
  }
  return LimitDeformation(dom, RotationProfile1D(dom.a, dom.b, std::move(pieces)),
                          BVFunction1D(dom.a, dom.b, std::move(ac), std::move(js), st));
}

py::dict sweep_dict(const SweepResult& s) {
  py::dict d;
  std::vector<Pair> pts;
  for (const SweepPoint& p : s.points) pts.emplace_back(p.eps, p.value);
  d["points"] = pts;
  d["extrapolated"] = s.extrapolated;
  d["rate"] = s.rate;
  d["reliable"] = s.reliable;
  d["warnings"] = s.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Layered bilayer deformations: constructions, energies and convergence checks";

  py::register_exception<Error>(m, "BilayerError", PyExc_ValueError);

  m.def("rotation_from_angle", [](double t) { return from_mat(rotation_from_angle(t)); }, py::arg("theta"));
  m.def("in_me1", [](const py::array_t<double>& f, double tol) { return in_me1(to_mat(f), tol); }, py::arg("f"),
        py::arg("tol") = kDefaultMembershipTol);
  m.def(
      "decompose_me1",
      [](const py::array_t<double>& f) {
        const SlipDecomposition d = decompose_me1(to_mat(f));
        return std::make_pair(d.angle, d.gamma);
      },
      py::arg("f"), "Returns (angle, gamma) with F = R(angle)(I + gamma e1 x e2).");
  m.def("recompose", [](double angle, double gamma) { return from_mat(recompose(angle, gamma)); }, py::arg("angle"),
        py::arg("gamma"));
  m.def("optimal_translation_gap", [](const Pair& a) { return optimal_translation_gap(to_vec(a)); }, py::arg("a"));

  py::class_<LimitDeformation>(m, "LimitDeformation")
      .def(py::init(&make_limit), py::arg("domain") = std::array<double, 4>{0.0, 1.0, -1.0, 1.0},
           py::arg("rotation"), py::arg("ac_t") = std::vector<double>{}, py::arg("ac_v") = std::vector<Pair>{},
           py::arg("jumps") = std::vector<std::pair<double, Pair>>{}, py::arg("staircase") = py::none(),
           "rotation: [(lo, hi, angle)], jumps: [(at, (x, y))], staircase: (depth, rise, c0, c1)")
      .def_property_readonly("tag", [](const LimitDeformation& u) { return std::string(to_string(u.tag())); })
      .def("__call__", [](const LimitDeformation& u, const Pair& x) { return from_vec(u(to_vec(x))); })
      .def("jump_mass", &jump_mass)
      .def("e_limit", [](const LimitDeformation& u) { return energy_dict(e_limit(u)); })
      .def(
          "e_delta_limit",
          [](const LimitDeformation& u, double delta, double p) { return energy_dict(e_delta_limit(u, PenaltySpec{delta, p})); },
          py::arg("delta") = 0.1, py::arg("p") = 3.0);

  m.def(
      "single_jump_limit",
      [](double angle_minus, double angle_plus, const Pair& psi_minus, const Pair& psi_plus, double at) {
        return single_jump_limit(Domain2D{0.0, 1.0, -1.0, 1.0}, angle_minus, angle_plus, to_vec(psi_minus),
                                 to_vec(psi_plus), at);
      },
      py::arg("angle_minus"), py::arg("angle_plus"), py::arg("psi_minus"), py::arg("psi_plus"), py::arg("at") = 0.0);

  py::class_<PiecewiseAffineField>(m, "Field")
      .def_readonly("eps", &PiecewiseAffineField::eps)
      .def_readonly("lambda_", &PiecewiseAffineField::lambda)
      .def("__len__", [](const PiecewiseAffineField& f) { return f.cells.size(); })
      .def("polygon", [](const PiecewiseAffineField& f, std::size_t i) {
        std::vector<Pair> out;
        for (const Vec2& v : f.cells.at(i).polygon) out.push_back(from_vec(v));
        return out;
      })
      .def("image", [](const PiecewiseAffineField& f, std::size_t i) {
        std::vector<Pair> out;
        for (const Vec2& v : f.cells.at(i).image()) out.push_back(from_vec(v));
        return out;
      })
      .def("gradient", [](const PiecewiseAffineField& f, std::size_t i) { return from_mat(f.cells.at(i).gradient); })
      .def("is_rigid", [](const PiecewiseAffineField& f, std::size_t i) { return f.cells.at(i).layer == Layer::Rigid; })
      .def("e_eps", [](const PiecewiseAffineField& f) { return energy_dict(e_eps(f)); })
      .def("e_eps_intrinsic", [](const PiecewiseAffineField& f) { return energy_dict(e_eps_intrinsic(f)); })
      .def(
          "e_delta_eps",
          [](const PiecewiseAffineField& f, double delta, double p) { return energy_dict(e_delta_eps(f, PenaltySpec{delta, p})); },
          py::arg("delta") = 0.1, py::arg("p") = 3.0)
      .def("gradient_total_variation", &gradient_total_variation)
      .def("total_area", &total_area)
      .def("admissible", [](const PiecewiseAffineField& f, double tol) { return validate_admissibility(f, tol).pass; },
           py::arg("tol") = kDefaultMembershipTol)
      .def("compatibility_defect", &validate_compatibility)
      .def("continuity_defect", &continuity_defect)
      .def("l1_distance", &l1_distance_to_limit)
      .def("svg", &render_svg);

  using OptAngle = std::optional<double>;
  m.def("single_jump_general", &single_jump_general, py::arg("u"), py::arg("s_angle") = OptAngle{}, py::arg("eps"),
        py::arg("lambda_") = kDefaultLambda);
  m.def("single_jump_variant_i", &single_jump_variant_i, py::arg("u"), py::arg("rho"), py::arg("eps"),
        py::arg("lambda_") = kDefaultLambda);
  m.def("single_jump_variant_ii", &single_jump_variant_ii, py::arg("u"), py::arg("s_angle") = OptAngle{},
        py::arg("eps"), py::arg("lambda_") = kDefaultLambda);
  m.def("single_jump_variant_iii", &single_jump_variant_iii, py::arg("u"), py::arg("eps"),
        py::arg("lambda_") = kDefaultLambda);
  m.def("multi_jump", &multi_jump, py::arg("u"), py::arg("eps"), py::arg("lambda_") = kDefaultLambda);
  m.def("parallel_recovery", &parallel_recovery, py::arg("u"), py::arg("eps"), py::arg("lambda_") = kDefaultLambda);

  m.def("dyadic_eps", &dyadic_eps, py::arg("kmin"), py::arg("kmax"), py::arg("lambda_") = kDefaultLambda);
  m.def(
      "analyze_sweep",
      [](const std::vector<Pair>& pts) {
        std::vector<SweepPoint> v;
        for (const Pair& p : pts) v.push_back({p.first, p.second});
        return sweep_dict(analyze_sweep(v));
      },
      py::arg("points"));
  m.def(
      "energy_sweep",
      [](const std::function<PiecewiseAffineField(double)>& build, const LimitDeformation& u, const std::vector<double>& eps) {
        std::vector<PiecewiseAffineField> fields;
        // Builders may be Python callables; build under the GIL before sweeping.
        for (double e : eps) fields.push_back(build(e));
        auto lookup = [&](double e) {
          for (std::size_t k = 0; k < eps.size(); ++k)
            if (eps[k] == e) return fields[k];
          throw Error(ErrorKind::InvalidInput, "eps outside the prebuilt sweep");
        };
        return sweep_dict(sweep(lookup, u, Quantity::EEps, eps));
      },
      py::arg("build"), py::arg("u"), py::arg("eps"));
  m.def(
      "weak_star_gaps",
      [](const PiecewiseAffineField& f, const LimitDeformation& u) {
        std::vector<double> out;
        for (const TestFunction& phi : default_battery(u.domain())) out.push_back(weak_star_gap(f, u, phi));
        return out;
      },
      py::arg("field"), py::arg("u"));

  m.def(
      "run_scenario",
      [](const std::string& path, std::optional<int> eps_kmax) {
        RunOptions opt;
        opt.eps_kmax = eps_kmax;
        const RunReport r = run_scenario(load_scenario(path), opt);
        py::dict d;
        d["scenario"] = r.scenario;
        d["construction"] = r.construction;
        d["csv"] = r.csv;
        d["cc_csv"] = r.cc_csv;
        d["extrapolated"] = r.energy_sweep.extrapolated;
        d["predicted"] = r.predicted ? py::cast(*r.predicted) : py::none();
        d["warnings"] = r.warnings;
        return d;
      },
      py::arg("path"), py::arg("eps_kmax") = std::optional<int>{});

  m.def(
      "run_property_suite",
      [](std::uint64_t seed, std::size_t n) {
        std::vector<py::dict> out;
        for (const PropertyResult& r : run_property_suite(seed, n)) {
          py::dict d;
          d["name"] = r.name;
          d["instances"] = r.instances;
          d["failures"] = r.failures;
          d["worst"] = r.worst;
          d["first_failure"] = r.first_failure;
          out.push_back(d);
        }
        return out;
      },
      py::arg("seed") = 20240601, py::arg("n") = 100);
}
