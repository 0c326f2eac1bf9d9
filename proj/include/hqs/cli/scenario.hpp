#pragma once

#include <string>
#include <vector>

#include "hqs/cli/config.hpp"

namespace hqs::cli {

const std::vector<std::string>& scenario_names();

/// Parameter grid reproducing one figure's data. Throws ConfigError for an
/// unknown name. Output paths are left empty.
std::vector<RunConfig> scenario(const std::string& name);

/// Worker count: hardware concurrency, capped by HQS_THREADS when set.
int worker_count();

struct ScenarioSummary {
  int runs = 0;
  int failures = 0;
  int worst_exit = 0;
};

/// Runs every config of `name` in parallel and writes <out_dir>/<run>.csv
/// (+ sidecars) from a single collector. Failures are reported on `log`.
ScenarioSummary run_scenario(const std::string& name, const std::string& out_dir, std::ostream& log);

}  // namespace hqs::cli
