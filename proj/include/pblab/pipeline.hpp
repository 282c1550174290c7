#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pblab/config.hpp"

namespace pblab {

// Outcome of one batch command: a structured report plus optional delimited
// plot tables.  Exit codes follow the 0 pass / 1 fail / 2 not-verifiable /
// 3 usage contract (3 is produced by throwing ConfigError before any result
// exists, never stored here).
struct CommandResult {
  nlohmann::json report;
  int exit_code = 0;
  std::vector<std::pair<std::string, std::string>> tables;  // filename -> body
};

CommandResult run_check_rays(const RunConfig& cfg);
CommandResult run_find_orbits(const RunConfig& cfg);
CommandResult run_certify(const RunConfig& cfg);
CommandResult run_basket(const RunConfig& cfg);

// Write `<command>_report.json` and the tables into cfg.output_dir.
// Returns the paths written.  Reports are deterministic for a fixed config
// and rng_seed except for the top-level "timestamp" field.
std::vector<std::string> write_outputs(const CommandResult& result, const RunConfig& cfg,
                                       const std::string& command);

}  // namespace pblab
