#ifndef HQM_EXPERIMENTS_HPP
#define HQM_EXPERIMENTS_HPP

#include <string>
#include <vector>

#include "hqm/report.hpp"

namespace hqm {

// Registered experiment families (also the CLI subcommands).
std::vector<std::string> experiment_names();

// Runs the experiment described by a JSON config:
//   { "experiment": "<name>", "seed": <u64>, ...params }
// Seeds are mandatory; every run is deterministic given the config. CSV
// artifacts and the JSON report land in out_dir; the returned report's
// artifact list carries their paths.
ExperimentReport run_experiment_json(const std::string& config_json,
                                     const std::string& out_dir);

// Convenience: load config from a file and run. Returns the report.
ExperimentReport run_config_file(const std::string& config_path,
                                 const std::string& out_dir);

// Minimal schema check of an emitted report (required keys and metric
// fields present).
bool report_json_valid(const std::string& report_json);

}  // namespace hqm

#endif
