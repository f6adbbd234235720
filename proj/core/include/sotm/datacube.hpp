#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sotm {

/// Ordinal label of a time slice. Integer keys order numerically, all other
/// keys lexicographically; comparing an integer key with a text key throws.
struct TimeKey {
  std::string label;
  std::optional<std::int64_t> ordinal;

  static TimeKey parse(std::string text);
  static TimeKey text(std::string text) { return {std::move(text), std::nullopt}; }
  static TimeKey integer(std::int64_t value) { return {std::to_string(value), value}; }

  bool is_integer() const noexcept { return ordinal.has_value(); }

  friend bool operator==(const TimeKey& a, const TimeKey& b) { return a.label == b.label; }
};

/// Strict ordering; throws SchemaError on mixed integer/text keys.
bool time_key_less(const TimeKey& a, const TimeKey& b);

struct Observation {
  std::string entity_id;
  std::vector<double> features;
  double weight = 1.0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct TimeSlice {
  TimeKey time_key;
  std::vector<Observation> observations;

  std::size_t size() const noexcept { return observations.size(); }
  std::size_t dim() const noexcept {
    return observations.empty() ? 0 : observations.front().features.size();
  }
  double total_weight() const noexcept;

  friend bool operator==(const TimeSlice&, const TimeSlice&) = default;
};

/// Entity x time x feature panel. Slices are kept in strictly increasing
/// time order; entities may be missing from some slices.
class DataCube {
 public:
  /// Validates every invariant and throws SchemaError / ContractError.
  DataCube(std::vector<std::string> feature_names, std::vector<TimeSlice> slices);

  std::size_t slice_count() const noexcept { return slices_.size(); }
  std::size_t dim() const noexcept { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<TimeSlice>& slices() const noexcept { return slices_; }
  std::vector<TimeKey> time_keys() const;

  /// Zero-based; throws RangeError when out of range.
  const TimeSlice& slice(std::size_t index) const;

  friend bool operator==(const DataCube&, const DataCube&) = default;

 private:
  std::vector<std::string> feature_names_;
  std::vector<TimeSlice> slices_;
};

inline const TimeSlice& slice(const DataCube& cube, std::size_t index) {
  return cube.slice(index);
}

/// Column mapping for tabular input. Every column that is not the entity,
/// time, or weight column is a feature, in header order.
struct CsvSchema {
  std::string entity_column = "entity";
  std::string time_column = "time";
  std::string weight_column = "weight";
};

DataCube load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
DataCube parse_csv(std::istream& in, const CsvSchema& schema = {});

/// Writes `entity,time,weight,<features...>` with round-trip precision.
void write_csv(const DataCube& cube, std::ostream& out, const CsvSchema& schema = {});

enum class PercentileMode { expanding, full_history };

/// Replaces each feature value with its inclusive empirical CDF rank,
/// count(history <= v) / |history|, within the same entity's history.
DataCube percentile_normalize(const DataCube& cube,
                              PercentileMode mode = PercentileMode::full_history);

}  // namespace sotm
