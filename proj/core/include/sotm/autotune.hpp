#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sotm/datacube.hpp"
#include "sotm/quality.hpp"
#include "sotm/reference_array.hpp"
#include "sotm/training.hpp"

namespace sotm {

/// Candidate starting radii, strictly increasing and positive.
struct TuneGrid {
  std::vector<double> candidates;

  /// `count` values evenly spaced in log scale over [lo, hi].
  static TuneGrid log_spaced(double lo, double hi, std::size_t count);
  /// 16 log-spaced values in [0.3, units].
  static TuneGrid defaults(std::size_t units);

  void validate() const;
};

struct CandidateScore {
  double sigma;
  double kl;

  friend bool operator==(const CandidateScore&, const CandidateScore&) = default;
};

struct SliceTune {
  TimeKey time_key;
  double chosen_sigma = 0.0;
  std::vector<CandidateScore> kl_by_candidate;
};

struct TuneReport {
  std::vector<SliceTune> per_slice;
};

struct TuneResult {
  double sigma;
  ReferenceArray array;
  std::vector<CandidateScore> kl_by_candidate;
};

/// Trains a copy of `init` for each candidate and keeps the one with the
/// lowest Kaski-Lagus measure. Exact ties go to the larger radius.
TuneResult tune_sigma(const ReferenceArray& init, const TimeSlice& slice, const TuneGrid& grid,
                      int steps, SigmaDecay decay, double sigma_floor,
                      const MetricOptions& options = {});

struct AutoTrainResult {
  SotmModel model;
  TuneReport tune;
  QualityReport quality;
};

/// Chained training where each slice picks its own radius with tune_sigma
/// and the next slice starts from the winning array. `config.sigma` is
/// ignored; the chosen radii are recorded in the model.
AutoTrainResult auto_train(const DataCube& cube, const TrainConfig& config, const TuneGrid& grid,
                           const MetricOptions& options = {});

/// Recomputes every candidate of every slice from the model's own chain and
/// checks the report against it: recorded values reproduce, and the chosen
/// radius attains the grid minimum under the tie rule. Returns one message
/// per violation; empty means the report is consistent.
std::vector<std::string> verify_tune_report(const SotmModel& model, const DataCube& cube,
                                            const TuneReport& report,
                                            const MetricOptions& options = {});

}  // namespace sotm
