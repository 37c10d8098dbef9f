#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "bilayer/errors.hpp"
#include "bilayer/runner.hpp"
#include "bilayer/scenario.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bilayer;
using namespace bilayer::testing;

#ifndef BILAYER_SCENARIO_DIR
#define BILAYER_SCENARIO_DIR "scenarios"
#endif

namespace {

std::string scenario_path(const std::string& name) { return std::string(BILAYER_SCENARIO_DIR) + "/" + name; }

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  FAIL("missing column " << name);
  return 0;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("exit codes by error kind") {
  CHECK(exit_code_for(ErrorKind::ParseError) == 2);
  CHECK(exit_code_for(ErrorKind::PreconditionError) == 3);
  CHECK(exit_code_for(ErrorKind::BuildError) == 4);
  CHECK(exit_code_for(ErrorKind::CellsCollide) == 4);
}

TEST_CASE("scenario parsing rejects malformed input") {
  CHECK(kind_of([] { parse_scenario("{not json"); }) == ErrorKind::ParseError);
  CHECK(kind_of([] { parse_scenario(R"({"schema_version": 99, "name": "x", "construction": "general"})"); }) ==
        ErrorKind::ParseError);
  CHECK(kind_of([] { parse_scenario(R"({"schema_version": 1, "name": "x", "construction": "nope"})"); }) ==
        ErrorKind::ParseError);
  CHECK(kind_of([] { load_scenario("/nonexistent/file.json"); }) == ErrorKind::ParseError);
}

TEST_CASE("scenario parsing reads the documented keys") {
  const Scenario s = parse_scenario(R"({
    "schema_version": 1, "name": "demo", "construction": "variant_i", "lambda": 0.25,
    "domain": {"x1": [0, 1], "x2": [-1, 1]},
    "limit": {"rotation": [{"lo": -1, "hi": 0, "angle": -0.5}, {"lo": 0, "hi": 1, "angle": 0.5}],
              "psi": {"jumps": [{"at": 0, "amplitude": [0.1, 0.2]}]}},
    "params": {"rho": 0.3},
    "eps_sweep": {"k_min": 4, "k_max": 7},
    "penalty": {"delta": 0.2, "p": 4},
    "outputs": {"csv": "out.csv"}
  })");
  CHECK(s.name == "demo");
  CHECK(s.construction == ConstructionKind::VariantI);
  CHECK(s.lambda == 0.25);
  CHECK(s.rho == 0.3);
  CHECK(s.k_min == 4);
  CHECK(s.k_max == 7);
  REQUIRE(s.penalty.has_value());
  CHECK(s.penalty->p == 4.0);
  CHECK(s.limit().tag() == ClassTag::A_SBV_INF);
}

TEST_CASE("precondition failures are reported before building") {
  const Scenario s = parse_scenario(R"({
    "schema_version": 1, "name": "par", "construction": "variant_ii",
    "limit": {"rotation": 0, "psi": {"jumps": [{"at": 0, "amplitude": [0.7, 0]}]}}
  })");
  CHECK(kind_of([&] { run_scenario(s); }) == ErrorKind::PreconditionError);
}

TEST_CASE("bundled pi/6 scenario reproduces the general limit") {
  const RunReport r = run_scenario(load_scenario(scenario_path("lemma43_pi6.json")));
  double a = 0.0;
  double b = 0.0;
  cramer({0.3, 0.4}, unit(kPi / 6.0), unit(kPi / 2.0), a, b);
  CHECK(std::abs(r.energy_sweep.extrapolated - (std::abs(a) + std::abs(b) + 2.0)) <= 1e-3);
  const auto rows = parse_csv(r.csv);
  REQUIRE(rows.size() >= 2);
  const std::size_t ex = column(rows[0], "extrapolated");
  CHECK(std::abs(std::stod(rows[1][ex]) - (std::abs(a) + std::abs(b) + 2.0)) <= 1e-3);
  CHECK(rows[0].size() == 15);
}

TEST_CASE("bundled exact scenario has a zero gap column") {
  const RunReport r = run_scenario(load_scenario(scenario_path("variant3_exact.json")));
  const auto rows = parse_csv(r.csv);
  const std::size_t g = column(rows[0], "gap");
  REQUIRE(rows.size() > 2);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(std::stod(rows[i][g])) <= 1e-12);
}

TEST_CASE("bundled mismatch scenario reports half the line integral") {
  const RunReport r = run_scenario(load_scenario(scenario_path("cc_mismatch.json")));
  const auto rows = parse_csv(r.cc_csv);
  REQUIRE(rows.size() == 4);
  const std::size_t mi = column(rows[0], "mismatch");
  const std::size_t i0 = column(rows[0], "i0");
  // The x2^2 weight vanishes on the jump line.
  const double want[3] = {1.0 / 6.0, 1.0 / 12.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(std::stod(rows[k + 1][i0]) - want[k]) <= 1e-15);
    CHECK(std::abs(std::stod(rows[k + 1][mi]) - 0.5 * want[k]) <= 1e-4);
  }
}

TEST_CASE("CSV output is byte identical across runs") {
  const Scenario s = load_scenario(scenario_path("two_jumps_tv.json"));
  RunOptions serial;
  serial.parallel = false;
  const RunReport a = run_scenario(s);
  const RunReport b = run_scenario(s);
  const RunReport c = run_scenario(s, serial);
  CHECK(a.csv == b.csv);
  CHECK(a.csv == c.csv);
}

TEST_CASE("format_number round trips 17 significant digits") {
  for (double v : {0.1, 1.0 / 3.0, 2.5732050807568876, -1e-300, 12345.678901234567}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(std::nan("")) == "nan");
  CHECK(format_number(INFINITY) == "inf");
}

TEST_CASE("SVG deformed polygons are the cell images") {
  for (const char* name : {"lemma43_pi6.json", "two_jumps_tv.json", "parallel_staircase.json"}) {
    const Scenario s = load_scenario(scenario_path(name));
    const LimitDeformation u = s.limit();
    const PiecewiseAffineField f = build_field(s, u, std::ldexp(s.lambda, -5));
    const std::string svg = render_svg(f);
    const std::size_t deformed = svg.find("<g id=\"deformed\"");
    REQUIRE(deformed != std::string::npos);
    CHECK(svg.find("<g id=\"reference\"") < deformed);

    const std::regex poly("<polygon data-cell=\"([0-9]+)\"[^>]*points=\"([^\"]*)\"");
    std::size_t checked = 0;
    const std::string tail = svg.substr(deformed);
    for (auto it = std::sregex_iterator(tail.begin(), tail.end(), poly); it != std::sregex_iterator(); ++it) {
      const std::size_t idx = std::stoul((*it)[1]);
      REQUIRE(idx < f.cells.size());
      const Cell& c = f.cells[idx];
      std::istringstream pts((*it)[2].str());
      std::string pair;
      std::size_t k = 0;
      while (pts >> pair) {
        const std::size_t comma = pair.find(',');
        const Vec2 got{std::stod(pair.substr(0, comma)), std::stod(pair.substr(comma + 1))};
        REQUIRE(k < c.polygon.size());
        const Vec2 want = c.gradient * c.polygon[k] + c.offset;
        CHECK(norm(got - want) <= 1e-9);
        ++k;
      }
      CHECK(k == c.polygon.size());
      ++checked;
    }
    CHECK(checked == f.cells.size());
  }
}

TEST_CASE("SVG of an identity field is congruent to the reference") {
  const PiecewiseAffineField f = uniform_field(Mat2::identity(), Mat2::identity(), 0.25);
  for (const Cell& c : f.cells) {
    const std::vector<Vec2> img = c.image();
    for (std::size_t k = 1; k < img.size(); ++k)
      CHECK(norm((img[k] - img[0]) - (c.polygon[k] - c.polygon[0])) <= 1e-15);
  }
  CHECK(render_svg(f).find("<svg") != std::string::npos);
}

TEST_CASE("recheck_field rejects an inadmissible field") {
  CHECK(kind_of([] { recheck_field(uniform_field(Mat2::identity(), shear(1.0))); }) == ErrorKind::BuildError);
  recheck_field(uniform_field(shear(1.0), Mat2::identity()));
}
