#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bilayer/convergence.hpp"
#include "bilayer/errors.hpp"
#include "bilayer/invariants.hpp"
#include "bilayer/runner.hpp"
#include "bilayer/scenario.hpp"

namespace fs = std::filesystem;
using namespace bilayer;

namespace {

constexpr std::uint64_t kSelftestSeed = 20240601;

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::BuildError, "cannot write " + path.string());
  out << text;
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir, int eps_kmax, bool svg) {
  const Scenario s = load_scenario(scenario_path);
  RunOptions opt;
  if (eps_kmax >= 0) opt.eps_kmax = eps_kmax;
  opt.svg = svg;
  const RunReport rep = run_scenario(s, opt);
  const fs::path dir(out_dir);
  write_file(dir / s.csv_path, rep.csv);
  std::cout << "wrote " << (dir / s.csv_path).string() << "\n";
  if (!rep.cc_csv.empty()) {
    const fs::path cc = dir / (fs::path(s.csv_path).stem().string() + "_cc.csv");
    write_file(cc, rep.cc_csv);
    std::cout << "wrote " << cc.string() << "\n";
  }
  if (!rep.svg.empty()) {
    write_file(dir / s.svg_path, rep.svg);
    std::cout << "wrote " << (dir / s.svg_path).string() << "\n";
  }
  for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "extrapolated e_eps " << format_number(rep.energy_sweep.extrapolated) << ", rate "
            << format_number(rep.energy_sweep.rate);
  if (rep.predicted) std::cout << ", predicted " << format_number(*rep.predicted);
  std::cout << "\n";
  return 0;
}

int cmd_table(const std::vector<double>& alphas, const std::vector<double>& betas, int kmin, int kmax,
              const std::string& out) {
  GapScenario sc;
  sc.kmin = kmin;
  sc.kmax = kmax;
  const std::vector<GapRow> rows = gap_table(sc, alphas, betas);
  std::ostringstream csv;
  csv << "construction,alpha,beta,lim_e_eps,e_limit,gap,predicted,rate,within_bound,pattern_holds\n";
  bool ok = true;
  for (const GapRow& r : rows) {
    csv << to_string(r.construction) << ',' << format_number(r.alpha) << ',' << format_number(r.beta) << ','
        << format_number(r.limit_estimate) << ',' << format_number(r.e_limit) << ',' << format_number(r.gap) << ','
        << format_number(r.predicted) << ',' << format_number(r.rate) << ',' << (r.within_bound ? 1 : 0) << ','
        << (r.pattern_holds ? 1 : 0) << '\n';
    ok = ok && r.within_bound && r.pattern_holds;
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(out, csv.str());
    std::cout << "wrote " << out << "\n";
  }
  if (!ok) {
    std::cerr << "gap table: sign pattern violated\n";
    return 4;
  }
  return 0;
}

int cmd_selftest(std::size_t n) {
  bool ok = true;
  for (const PropertyResult& r : run_property_suite(kSelftestSeed, n)) {
    std::printf("%s  %-58s n=%zu worst=%.3e%s%s\n", r.pass() ? "PASS" : "FAIL", r.name.c_str(), r.instances, r.worst,
                r.first_failure.empty() ? "" : "  first failure: ", r.first_failure.c_str());
    ok = ok && r.pass();
  }
  return ok ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered single-slip recovery sequences: scenario runner"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  int eps_kmax = -1;
  bool svg = false;
  auto* run = app.add_subcommand("run", "Build a scenario over its eps sweep and write CSV (and SVG)");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("--out-dir", out_dir, "Output directory");
  run->add_option("--eps-kmax", eps_kmax, "Override the finest sweep level k (eps = lambda 2^-k)");
  run->add_flag("--svg", svg, "Also render the reference and deformed configurations");

  std::string table_name;
  std::vector<double> alphas{-1.5, -0.5, 0.0, 0.5, 1.5};
  std::vector<double> betas{-1.0, 0.5, 0.75, 1.0, 2.0};
  int table_kmin = 5;
  int table_kmax = 8;
  std::string table_out;
  auto* table = app.add_subcommand("table", "Print a gap table");
  table->add_option("name", table_name, "Table name")->required()->check(CLI::IsMember({"remark52"}));
  table->add_option("--alpha-grid", alphas, "Values of alpha")->delimiter(',');
  table->add_option("--beta-grid", betas, "Values of beta")->delimiter(',');
  table->add_option("--kmin", table_kmin, "Coarsest sweep level");
  table->add_option("--kmax", table_kmax, "Finest sweep level");
  table->add_option("--out", table_out, "Write the CSV here instead of stdout");

  std::size_t selftest_n = 200;
  auto* selftest = app.add_subcommand("selftest", "Run the randomized invariant suite");
  selftest->add_option("-n,--instances", selftest_n, "Instances per property");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(scenario_path, out_dir, eps_kmax, svg);
    if (*table) return cmd_table(alphas, betas, table_kmin, table_kmax, table_out);
    if (*selftest) return cmd_selftest(selftest_n);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
