#pragma once

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trigapprox/acceptance.hpp"
#include "trigapprox/runner.hpp"
#include "trigapprox/scenario.hpp"

namespace trigapprox::cli {

namespace detail {

inline int write_report(const std::vector<ScenarioReport>& reports, const std::string& path) {
  for (const auto& r : reports) std::cout << format_table(r);
  if (!path.empty()) {
    std::ofstream out(path);
    if (!out) {
      std::cerr << "error: cannot write " << path << "\n";
      return 1;
    }
    out << to_json(reports).dump(2) << "\n";
  }
  for (const auto& r : reports)
    if (!r.error.empty()) std::cerr << "error in " << r.name << ": " << r.error << "\n";
  return exit_code(reports);
}

}  // namespace detail

inline int main(int argc, char** argv) {
  CLI::App app{"Weighted L^alpha distances to trigonometric polynomials with primal/dual certificates"};
  app.require_subcommand(1);

  std::string config_path, report_path;
  std::int64_t grid = 0;
  int jobs = 1;
  bool timings = false;
  std::vector<std::int64_t> sweep_windows;

  auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("config", config_path, "scenario file (TOML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--grid", grid, "override the grid size N")->check(CLI::Range(std::int64_t{2}, std::int64_t{1} << 24));
    sub->add_option("--jobs", jobs, "scenarios run concurrently")->check(CLI::PositiveNumber);
    sub->add_option("--report", report_path, "write the JSON report here");
  };

  auto* run = app.add_subcommand("run", "solve every scenario in a config file");
  add_common(run, true);
  run->add_flag("--timings", timings, "include wall-clock timings in the report");

  auto* oracle = app.add_subcommand("oracle", "brute-force distance for cyclic-group scenarios");
  add_common(oracle, true);

  auto* verify = app.add_subcommand("verify", "run the built-in reference suite");

  auto* sweep = app.add_subcommand("sweep", "rerun scenarios with a common list of primal and dual windows");
  add_common(sweep, true);
  sweep->add_option("--windows", sweep_windows, "ascending window list")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (verify->parsed()) {
    int failed = 0;
    const auto suite = acceptance::all();
    for (std::size_t i = 0; i < suite.size(); ++i) {
      const auto c = acceptance::run(suite[i], static_cast<int>(i + 1));
      std::cout << acceptance::format(c) << std::endl;
      failed += c.passed ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
  }

  LoadOptions opt;
  if (grid > 0) opt.grid = grid;
  std::vector<Scenario> scenarios;
  try {
    scenarios = config::load(config_path, opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  if (oracle->parsed()) {
    int code = 0;
    for (const auto& sc : scenarios) {
      try {
        auto red = trigapprox::detail::apply_reduction(sc);
        const auto r = oracle_distance(red.measure, sc.S, sc.s, sc.k, sc.exponents());
        std::printf("%s  oracle %.15f\n", sc.name.c_str(), r.distance);
      } catch (const std::exception& e) {
        std::cerr << "error in " << sc.name << ": " << e.what() << "\n";
        code = 1;
      }
    }
    return code;
  }

  if (sweep->parsed()) {
    for (std::size_t i = 1; i < sweep_windows.size(); ++i)
      if (sweep_windows[i] <= sweep_windows[i - 1] || sweep_windows[i - 1] < 0) {
        std::cerr << "error: --windows must be nonnegative and strictly ascending\n";
        return 1;
      }
    for (auto& sc : scenarios) sc.primal_windows = sc.dual_windows = sweep_windows;
  }
  return detail::write_report(run_all(scenarios, jobs, timings), report_path);
}

}  // namespace trigapprox::cli
