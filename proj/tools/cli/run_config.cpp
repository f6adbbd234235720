#include "cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "sotm/error.hpp"

namespace sotm::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_scalar(const std::string& text, const std::string& key) {
  T value{};
  const std::string t = trim(text);
  const char* first = t.data();
  const char* last = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (t.empty() || ec != std::errc{} || ptr != last) {
    throw ContractError("invalid value '" + text + "' for '" + key + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ContractError("invalid value '" + text + "' for '" + key + "'");
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ContractError("invalid boolean '" + text + "' for '" + key + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) items.push_back(trim(item));
  return items;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream out;
  out.precision(17);
  for (std::size_t n = 0; n < values.size(); ++n) out << (n ? "," : "") << values[n];
  return out.str();
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text, const std::string& key) {
  std::vector<double> values;
  for (const auto& item : split_list(text)) values.push_back(parse_scalar<double>(item, key));
  if (values.empty()) throw ContractError("empty list for '" + key + "'");
  return values;
}

PercentileMode parse_percentile_mode(const std::string& text) {
  if (text == "expanding") return PercentileMode::expanding;
  if (text == "full" || text == "full-history") return PercentileMode::full_history;
  throw ContractError("unknown normalization '" + text + "'");
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> settings;
  std::stringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ContractError("config line " + std::to_string(number) + ": expected 'key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ContractError("config line " + std::to_string(number) + ": empty key");
    settings[key] = trim(line.substr(eq + 1));
  }
  return settings;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "units") {
    c.train.units = parse_scalar<std::size_t>(value, key);
  } else if (key == "steps") {
    c.train.steps.clear();
    for (const auto& item : split_list(value)) c.train.steps.push_back(parse_scalar<int>(item, key));
    if (c.train.steps.empty()) throw ContractError("empty list for 'steps'");
  } else if (key == "sigma") {
    c.train.sigma = parse_number_list(value, key);
  } else if (key == "grid") {
    c.grid = parse_number_list(value, key);
  } else if (key == "decay") {
    c.train.decay = parse_sigma_decay(value);
  } else if (key == "sigma_floor") {
    c.train.sigma_floor = parse_scalar<double>(value, key);
  } else if (key == "pca_span") {
    c.train.pca_span = parse_scalar<double>(value, key);
  } else if (key == "seed") {
    c.train.seed = parse_scalar<std::uint64_t>(value, key);
  } else if (key == "input") {
    c.input = value;
  } else if (key == "out") {
    c.out = value;
  } else if (key == "normalize") {
    if (value != "none") parse_percentile_mode(value);
    c.normalize = value == "full-history" ? "full" : value;
  } else if (key == "entity_column") {
    c.schema.entity_column = value;
  } else if (key == "time_column") {
    c.schema.time_column = value;
  } else if (key == "weight_column") {
    c.schema.weight_column = value;
  } else if (key == "classical_distortion") {
    c.metrics.classical_distortion = parse_bool(value, key);
  } else if (key == "weighted_metrics") {
    c.metrics.weighted_metrics = parse_bool(value, key);
  } else {
    throw ContractError("unknown setting '" + key + "'");
  }
}

std::string effective_config_text(const RunConfig& c, const std::string& command) {
  std::ostringstream out;
  out.precision(17);
  out << "# effective configuration for `sotm " << command << "`\n"
      << "input = " << c.input.string() << '\n'
      << "out = " << c.out.string() << '\n'
      << "entity_column = " << c.schema.entity_column << '\n'
      << "time_column = " << c.schema.time_column << '\n'
      << "weight_column = " << c.schema.weight_column << '\n'
      << "normalize = " << c.normalize << '\n'
      << "units = " << c.train.units << '\n'
      << "steps = " << join(c.train.steps) << '\n';
  if (command == "tune") {
    out << "grid = " << (c.grid ? join(*c.grid) : std::string()) << '\n';
  } else {
    out << "sigma = " << join(c.train.sigma) << '\n';
  }
  out << "decay = " << to_string(c.train.decay) << '\n'
      << "sigma_floor = " << c.train.sigma_floor << '\n'
      << "pca_span = " << c.train.pca_span << '\n'
      << "seed = " << c.train.seed << '\n'
      << "classical_distortion = " << (c.metrics.classical_distortion ? "true" : "false") << '\n'
      << "weighted_metrics = " << (c.metrics.weighted_metrics ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace sotm::cli
