#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sotm/datacube.hpp"
#include "sotm/reference_array.hpp"

namespace sotm {

enum class SigmaDecay { constant, linear_to_floor };

std::string to_string(SigmaDecay decay);
SigmaDecay parse_sigma_decay(const std::string& text);

struct TrainConfig {
  std::size_t units = 7;
  /// Steps s_t per slice. A single entry applies to every slice.
  std::vector<int> steps{10};
  /// Starting radius per slice. A single entry applies to every slice.
  std::vector<double> sigma{1.0};
  SigmaDecay decay = SigmaDecay::linear_to_floor;
  double sigma_floor = 0.5;
  /// PCA init spreads units over +/- pca_span standard deviations.
  double pca_span = 2.0;
  std::uint64_t seed = 0;

  /// Throws ContractError if any field is out of range or a per-slice list
  /// does not match `slice_count`.
  void validate(std::size_t slice_count) const;

  int steps_for(std::size_t t) const;
  double sigma_for(std::size_t t) const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Radius at each of `steps` steps. `linear_to_floor` goes linearly from
/// `start` to min(start, max(floor, 0.1 * start)) and reaches it on the last
/// step; `constant` repeats `start`.
std::vector<double> sigma_schedule(double start, int steps, SigmaDecay decay, double floor);

/// Units along the first (weighted) principal component of the slice,
/// equally spaced over [-span * s, +span * s] around the weighted mean where
/// s is the standard deviation of the projections. Zero-variance data falls
/// back to tiny ordered offsets on the first coordinate and emits a warning.
ReferenceArray pca_init(const TimeSlice& slice, std::size_t units, double span);

/// One weighted batch step with BMUs frozen against the input array:
/// m_i = sum_j w_j h_ib(j) x_j / sum_j w_j h_ib(j).
ReferenceArray batch_update(const ReferenceArray& array, const TimeSlice& slice, double sigma);

/// Applies batch_update once per schedule entry.
ReferenceArray train_slice(const ReferenceArray& init, const TimeSlice& slice,
                           std::span<const double> sigma_schedule);

/// A trained sequence of arrays, one per slice, chained through time.
struct SotmModel {
  std::vector<ReferenceArray> arrays;
  TrainConfig config;
  std::vector<TimeKey> time_keys;
  std::vector<std::string> feature_names;
  /// Starting radius used (or chosen by tuning) for each slice.
  std::vector<double> sigma_chosen;
  /// Radius of the final training step of each slice; equals sigma_chosen
  /// when the slice had zero steps.
  std::vector<double> sigma_final;
  /// Preprocessing applied to the training data ("none", "expanding",
  /// "full"), so metrics can be recomputed from the raw input.
  std::string normalization = "none";

  std::size_t slice_count() const noexcept { return arrays.size(); }
  std::size_t units() const noexcept { return arrays.empty() ? 0 : arrays.front().units(); }
  std::size_t dim() const noexcept { return arrays.empty() ? 0 : arrays.front().dim(); }

  /// Throws SchemaError when arrays disagree in shape or with the metadata.
  void validate() const;

  friend bool operator==(const SotmModel&, const SotmModel&) = default;
};

/// Last entry of the schedule, or `start` for an empty schedule.
double final_sigma(std::span<const double> schedule, double start);

/// PCA init on the first slice, then each slice starts from the trained
/// array of the previous one.
SotmModel train_sotm(const DataCube& cube, const TrainConfig& config);

}  // namespace sotm
