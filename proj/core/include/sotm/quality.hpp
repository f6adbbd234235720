#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sotm/datacube.hpp"
#include "sotm/reference_array.hpp"
#include "sotm/training.hpp"

namespace sotm {

struct MetricOptions {
  /// Use sum_i h_ib ||x - m_i||^2 instead of the default h_ib ||x - m_b||
  /// inside the distortion measure.
  bool classical_distortion = false;
  /// Average per-observation terms with the instance weights instead of 1/N.
  bool weighted_metrics = false;
};

/// Mean distance from each observation to its BMU.
double qe_slice(const ReferenceArray& array, const TimeSlice& slice,
                const MetricOptions& options = {});

/// (1 / (N M)) sum_j sum_i h_ib(j) ||x_j - m_b(j)||, or the classical
/// variant when requested.
double dm_slice(const ReferenceArray& array, const TimeSlice& slice, double sigma,
                const MetricOptions& options = {});

/// Share of observations whose first and second BMU are not grid neighbours.
double te_slice(const ReferenceArray& array, const TimeSlice& slice,
                const MetricOptions& options = {});

/// Kaski-Lagus goodness: BMU distance plus the length, in input space, of the
/// grid path from the first to the second BMU.
double kl_slice(const ReferenceArray& array, const TimeSlice& slice,
                const MetricOptions& options = {});

/// Mean displacement of index-corresponding units between two arrays.
double sc_slice(const ReferenceArray& current, const ReferenceArray& previous);

struct SliceQuality {
  TimeKey time_key;
  std::size_t n = 0;
  double sigma = 0.0;
  double qe = 0.0;
  double dm = 0.0;
  double te = 0.0;
  double kl = 0.0;
  std::optional<double> sc;  // absent for the first slice
};

struct AggregateQuality {
  double qe = 0.0;
  double dm = 0.0;
  double te = 0.0;
  double kl = 0.0;
};

struct QualityReport {
  std::vector<SliceQuality> per_slice;
  AggregateQuality aggregate;
};

/// Every per-slice measure plus their 1/T means. The distortion measure uses
/// the model's final-step radius of each slice.
QualityReport aggregate(const SotmModel& model, const DataCube& cube,
                        const MetricOptions& options = {});

/// `time_key,n,sigma,qe,dm,te,kl,sc` rows followed by one `aggregate` row.
void write_metrics_csv(const QualityReport& report, std::ostream& out);

}  // namespace sotm
