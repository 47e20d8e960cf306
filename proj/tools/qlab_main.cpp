// Command-line runner: executes a check suite against a configuration file,
// persists the report, and emits plot-data tables for any attached series.
// Exit codes: 0 all checks pass (skips tolerated), 1 at least one failure,
// 2 usage or configuration errors.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include "qlab/common.hpp"
#include "qlab/report.hpp"
#include "qlab/suites.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qlab::ValidationError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi-norm laboratory suite runner"};
  app.require_subcommand(1);

  std::string suite;
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = qlab::SuiteOptions{}.seed;
  bool quick = false;

  CLI::App* run = app.add_subcommand("run", "execute one suite");
  run->add_option("suite", suite, "suite name")
      ->required()
      ->check(CLI::IsMember(qlab::suite_names()));
  run->add_option("--config", config_path, "configuration file (JSON)");
  run->add_option("--out", out_dir, "output directory for report and plots");
  run->add_option("--seed", seed, "master seed");
  run->add_flag("--quick", quick, "smoke mode: counts / 10, tolerances x 2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    qlab::SuiteOptions options;
    options.seed = seed;
    options.quick = quick;
    if (!config_path.empty()) options.config_json = read_file(config_path);

    const qlab::ExperimentReport report = qlab::run_suite(suite, options);

    for (const auto& rec : report.records) {
      std::printf("[%s] %s  estimate=%.6g bound=%.6g", rec.verdict.c_str(),
                  rec.id.c_str(), rec.estimate, rec.bound);
      if (!rec.note.empty()) std::printf("  (%s)", rec.note.c_str());
      std::printf("\n");
    }

    const std::string report_path = qlab::write_report(report, out_dir);
    std::printf("report: %s\n", report_path.c_str());

    std::set<std::string> kinds;
    for (const auto& s : report.series) kinds.insert(s.kind);
    for (const auto& kind : kinds) {
      for (const auto& path : qlab::emit_plot_data(report, kind, out_dir))
        std::printf("plot-data: %s\n", path.c_str());
    }

    int fails = 0, skips = 0;
    for (const auto& rec : report.records) {
      if (rec.verdict == "FAIL") ++fails;
      if (rec.verdict == "SKIP") ++skips;
    }
    std::printf("%s: %zu records, %d failed, %d skipped, %.1fs\n",
                suite.c_str(), report.records.size(), fails, skips,
                report.wall_seconds);
    return report.all_pass() ? 0 : 1;
  } catch (const qlab::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
