#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "wdecor/mc_harness.hpp"

namespace wdecor {

/// Parsed run configuration: the experiment plus where to write outputs.
struct RunConfig {
  ExperimentConfig experiment;
  std::string output_dir = ".";
};

/// Parses and validates a JSON run configuration. Unknown keys are rejected.
/// Failures throw Error(ConfigError) whose message names the offending key,
/// or the line and column for malformed JSON.
RunConfig parse_run_config(std::string_view text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Fully resolved configuration (every default filled in) as JSON; parsing
/// it back yields an equivalent RunConfig.
nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace wdecor
