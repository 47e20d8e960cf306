#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qlab {

// One verified statement: a stable dotted id, the claim in words, the
// measured number with its error, the bound it was held against, and the
// verdict (PASS, FAIL, or SKIP with a reason in `note`).
struct CheckRecord {
  std::string id;
  std::string claim;
  double estimate = 0.0;
  double std_error = 0.0;
  double bound = 0.0;
  std::string verdict;
  std::string note;
};

CheckRecord make_record(const std::string& id, const std::string& claim,
                        double estimate, double std_error, double bound,
                        bool pass);
CheckRecord skip_record(const std::string& id, const std::string& claim,
                        const std::string& reason);

// Table attached to a report for external plotting.
struct PlotSeries {
  std::string kind;  // slope | sandwich | spectrum
  std::string name;  // file stem, unique within the report
  bool loglog = false;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  double fit_slope = 0.0;      // slope kind only
  double fit_intercept = 0.0;  // slope kind only
};

struct ExperimentReport {
  std::string suite;
  std::string artifact_version = "qlab-report-v1";
  std::string generator_id;
  std::uint64_t seed = 0;
  bool quick = false;
  std::string config_snapshot;  // the configuration as serialized JSON
  std::vector<CheckRecord> records;
  std::vector<PlotSeries> series;
  double wall_seconds = 0.0;  // never part of the body

  bool all_pass() const;  // no FAIL verdict (SKIP does not fail a suite)
};

// Canonical body: sorted keys, records sorted by id, wall-clock excluded —
// byte-identical across reruns with the same config and seed.
std::string report_body_json(const ExperimentReport& report);

// Writes {"body": ..., "meta": {wall_seconds, written_at}} to a new
// timestamped file under out_dir (append-only: existing files are never
// overwritten) and returns the path.
std::string write_report(const ExperimentReport& report,
                         const std::string& out_dir);

// Delimiter-separated tables for every series of the requested kind;
// returns the written paths.  Unknown kind or no matching series is an
// error.
std::vector<std::string> emit_plot_data(const ExperimentReport& report,
                                        const std::string& kind,
                                        const std::string& out_dir);

}  // namespace qlab
