#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qlab/report.hpp"

namespace qlab {

// Options shared by every suite runner.  `config_json` is the raw text of
// the configuration file ("" = built-in defaults); it is stored verbatim in
// the report so a report always carries the configuration that produced it.
struct SuiteOptions {
  std::uint64_t seed = 20260816ULL;
  bool quick = false;  // counts / 10, deterministic tolerances x 2
  int workers = 0;     // <= 0: resolve from the QLAB_WORKERS variable
  std::string config_json;
};

// Runnable suite names, "all" last.
const std::vector<std::string>& suite_names();

// Executes the named suite's checks and returns the assembled report.
// Checks run concurrently up to the worker limit; every check derives its
// random streams from (seed, check id) only, so the records are identical
// for any worker count and for "all" versus the individual suite.
ExperimentReport run_suite(const std::string& suite,
                           const SuiteOptions& options);

// QLAB_WORKERS if set (clamped to [1, 64]), otherwise 4.
int worker_count_from_env();

}  // namespace qlab
