#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sotm/datacube.hpp"
#include "sotm/quality.hpp"
#include "sotm/training.hpp"

namespace sotm::cli {

/// Everything a run needs. Built from defaults, then a `key = value` config
/// file, then SOTM_SEED, then command-line flags.
struct RunConfig {
  TrainConfig train;
  std::optional<std::vector<double>> grid;
  std::filesystem::path input;
  std::filesystem::path out = ".";
  CsvSchema schema;
  std::string normalize = "full";
  MetricOptions metrics;
};

/// Parses `key = value` lines; `#` starts a comment. Throws ContractError
/// naming the line on malformed input.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Applies one setting. Throws ContractError on unknown keys or bad values.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Settings in a fixed key order, suitable for re-reading with
/// parse_config_text.
std::string effective_config_text(const RunConfig& config, const std::string& command);

std::vector<double> parse_number_list(const std::string& text, const std::string& key);
PercentileMode parse_percentile_mode(const std::string& text);

}  // namespace sotm::cli
