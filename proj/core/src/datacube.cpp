#include "sotm/datacube.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

#include "sotm/error.hpp"

namespace sotm {

namespace {

bool parse_int64(std::string_view text, std::int64_t& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out, std::chars_format::general);
  return ec == std::errc{} && ptr == last;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string to_round_trip(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

TimeKey TimeKey::parse(std::string text) {
  std::int64_t value = 0;
  if (parse_int64(text, value)) return {std::move(text), value};
  return {std::move(text), std::nullopt};
}

bool time_key_less(const TimeKey& a, const TimeKey& b) {
  if (a.is_integer() != b.is_integer()) {
    throw SchemaError("cannot order integer time key '" +
                      (a.is_integer() ? a.label : b.label) + "' against text time key '" +
                      (a.is_integer() ? b.label : a.label) + "'");
  }
  if (a.is_integer()) return *a.ordinal < *b.ordinal;
  return a.label < b.label;
}

double TimeSlice::total_weight() const noexcept {
  double total = 0.0;
  for (const auto& obs : observations) total += obs.weight;
  return total;
}

DataCube::DataCube(std::vector<std::string> feature_names, std::vector<TimeSlice> slices)
    : feature_names_(std::move(feature_names)), slices_(std::move(slices)) {
  if (slices_.empty()) throw EmptyInputError("data cube has no time slices");
  if (feature_names_.empty()) throw SchemaError("data cube has no feature columns");
  const std::size_t d = feature_names_.size();
  for (std::size_t t = 0; t < slices_.size(); ++t) {
    const auto& s = slices_[t];
    if (s.observations.empty()) {
      throw SchemaError("time slice '" + s.time_key.label + "' has no observations");
    }
    bool any_positive = false;
    for (const auto& obs : s.observations) {
      if (obs.features.size() != d) {
        throw SchemaError("observation '" + obs.entity_id + "' at time '" + s.time_key.label +
                          "' has " + std::to_string(obs.features.size()) + " features, expected " +
                          std::to_string(d));
      }
      for (double v : obs.features) {
        if (!std::isfinite(v)) {
          throw ContractError("non-finite feature for '" + obs.entity_id + "' at time '" +
                              s.time_key.label + "'");
        }
      }
      if (!std::isfinite(obs.weight) || obs.weight < 0.0) {
        throw ContractError("invalid weight for '" + obs.entity_id + "' at time '" +
                            s.time_key.label + "'");
      }
      any_positive = any_positive || obs.weight > 0.0;
    }
    if (!any_positive) {
      throw ContractError("time slice '" + s.time_key.label + "' has no positive weight");
    }
    if (t > 0 && !time_key_less(slices_[t - 1].time_key, s.time_key)) {
      throw SchemaError("time keys not strictly increasing at '" + s.time_key.label + "'");
    }
  }
}

std::vector<TimeKey> DataCube::time_keys() const {
  std::vector<TimeKey> keys;
  keys.reserve(slices_.size());
  for (const auto& s : slices_) keys.push_back(s.time_key);
  return keys;
}

const TimeSlice& DataCube::slice(std::size_t index) const {
  if (index >= slices_.size()) {
    throw RangeError("slice index " + std::to_string(index) + " out of range for " +
                     std::to_string(slices_.size()) + " slices");
  }
  return slices_[index];
}

DataCube parse_csv(std::istream& in, const CsvSchema& schema) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (line.empty()) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw EmptyInputError("input has no header row");

  std::ptrdiff_t entity_col = -1;
  std::ptrdiff_t time_col = -1;
  std::ptrdiff_t weight_col = -1;
  std::vector<std::size_t> feature_cols;
  std::vector<std::string> feature_names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const auto& name = header[c];
    if (name == schema.entity_column) {
      entity_col = static_cast<std::ptrdiff_t>(c);
    } else if (name == schema.time_column) {
      time_col = static_cast<std::ptrdiff_t>(c);
    } else if (!schema.weight_column.empty() && name == schema.weight_column) {
      weight_col = static_cast<std::ptrdiff_t>(c);
    } else {
      feature_cols.push_back(c);
      feature_names.push_back(name);
    }
  }
  if (entity_col < 0) throw SchemaError("missing entity column '" + schema.entity_column + "'");
  if (time_col < 0) throw SchemaError("missing time column '" + schema.time_column + "'");
  if (feature_cols.empty()) throw SchemaError("no feature columns in header");

  // Keyed by label; insertion order is irrelevant since slices are sorted.
  std::map<std::string, TimeSlice> groups;
  bool saw_integer = false;
  bool saw_text = false;
  std::size_t data_rows = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw SchemaError("row " + std::to_string(row) + ": expected " +
                        std::to_string(header.size()) + " columns, found " +
                        std::to_string(fields.size()));
    }
    Observation obs;
    obs.entity_id = fields[static_cast<std::size_t>(entity_col)];
    if (obs.entity_id.empty()) throw ParseError(row, schema.entity_column, "empty entity id");
    auto key = TimeKey::parse(fields[static_cast<std::size_t>(time_col)]);
    if (key.label.empty()) throw ParseError(row, schema.time_column, "empty time key");
    (key.is_integer() ? saw_integer : saw_text) = true;
    if (saw_integer && saw_text) {
      throw SchemaError("row " + std::to_string(row) +
                        ": time column mixes integer and text keys");
    }
    if (weight_col >= 0) {
      const auto& text = fields[static_cast<std::size_t>(weight_col)];
      double w = 0.0;
      if (!parse_double(text, w) || !std::isfinite(w)) {
        throw ParseError(row, schema.weight_column, "not a finite number: '" + text + "'");
      }
      if (w < 0.0) throw ParseError(row, schema.weight_column, "negative weight " + text);
      obs.weight = w;
    }
    obs.features.reserve(feature_cols.size());
    for (std::size_t f = 0; f < feature_cols.size(); ++f) {
      const auto& text = fields[feature_cols[f]];
      double v = 0.0;
      if (!parse_double(text, v) || !std::isfinite(v)) {
        throw ParseError(row, feature_names[f], "not a finite number: '" + text + "'");
      }
      obs.features.push_back(v);
    }
    auto& group = groups[key.label];
    if (group.observations.empty()) group.time_key = std::move(key);
    group.observations.push_back(std::move(obs));
    ++data_rows;
  }
  if (data_rows == 0) throw EmptyInputError("input has a header but no data rows");

  std::vector<TimeSlice> slices;
  slices.reserve(groups.size());
  for (auto& [label, s] : groups) slices.push_back(std::move(s));
  std::sort(slices.begin(), slices.end(), [](const TimeSlice& a, const TimeSlice& b) {
    return time_key_less(a.time_key, b.time_key);
  });
  return DataCube(std::move(feature_names), std::move(slices));
}

DataCube load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open input file '" + path.string() + "'");
  return parse_csv(in, schema);
}

void write_csv(const DataCube& cube, std::ostream& out, const CsvSchema& schema) {
  out << schema.entity_column << ',' << schema.time_column << ',' << schema.weight_column;
  for (const auto& name : cube.feature_names()) out << ',' << name;
  out << '\n';
  for (const auto& s : cube.slices()) {
    for (const auto& obs : s.observations) {
      out << obs.entity_id << ',' << s.time_key.label << ',' << to_round_trip(obs.weight);
      for (double v : obs.features) out << ',' << to_round_trip(v);
      out << '\n';
    }
  }
}

DataCube percentile_normalize(const DataCube& cube, PercentileMode mode) {
  const std::size_t d = cube.dim();
  const auto& slices = cube.slices();

  // Per entity and feature: the values in time order, tagged with their slice.
  struct History {
    std::vector<std::size_t> slice_of;
    std::vector<std::vector<double>> values;  // [feature][occurrence]
  };
  std::map<std::string, History> histories;
  for (std::size_t t = 0; t < slices.size(); ++t) {
    for (const auto& obs : slices[t].observations) {
      auto& h = histories[obs.entity_id];
      if (h.values.empty()) h.values.resize(d);
      h.slice_of.push_back(t);
      for (std::size_t k = 0; k < d; ++k) h.values[k].push_back(obs.features[k]);
    }
  }

  auto rank = [](const std::vector<double>& history, std::size_t count, double v) {
    std::size_t le = 0;
    for (std::size_t n = 0; n < count; ++n) le += history[n] <= v ? 1 : 0;
    return static_cast<double>(le) / static_cast<double>(count);
  };

  std::vector<TimeSlice> out;
  out.reserve(slices.size());
  for (std::size_t t = 0; t < slices.size(); ++t) {
    TimeSlice s{slices[t].time_key, {}};
    s.observations.reserve(slices[t].observations.size());
    for (const auto& obs : slices[t].observations) {
      const auto& h = histories.at(obs.entity_id);
      std::size_t count = h.slice_of.size();
      if (mode == PercentileMode::expanding) {
        count = static_cast<std::size_t>(
            std::upper_bound(h.slice_of.begin(), h.slice_of.end(), t) - h.slice_of.begin());
      }
      Observation o{obs.entity_id, std::vector<double>(d), obs.weight};
      for (std::size_t k = 0; k < d; ++k) o.features[k] = rank(h.values[k], count, obs.features[k]);
      s.observations.push_back(std::move(o));
    }
    out.push_back(std::move(s));
  }
  return DataCube(cube.feature_names(), std::move(out));
}

}  // namespace sotm
