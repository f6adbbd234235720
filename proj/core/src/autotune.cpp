#include "sotm/autotune.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "sotm/error.hpp"
#include "sotm/file_io.hpp"

namespace sotm {

TuneGrid TuneGrid::log_spaced(double lo, double hi, std::size_t count) {
  if (count == 0) throw ContractError("grid needs at least one candidate");
  if (!(lo > 0.0) || !(hi >= lo)) throw ContractError("log-spaced grid needs 0 < lo <= hi");
  TuneGrid grid;
  if (count == 1 || lo == hi) {
    grid.candidates = {lo};
    return grid;
  }
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t n = 0; n < count; ++n) {
    grid.candidates.push_back(n + 1 == count ? hi : lo * std::exp(step * static_cast<double>(n)));
  }
  return grid;
}

TuneGrid TuneGrid::defaults(std::size_t units) {
  return log_spaced(0.3, std::max(0.3, static_cast<double>(units)), 16);
}

void TuneGrid::validate() const {
  if (candidates.empty()) throw ContractError("tuning grid is empty");
  for (std::size_t n = 0; n < candidates.size(); ++n) {
    if (!(candidates[n] > 0.0) || !std::isfinite(candidates[n])) {
      throw ContractError("tuning grid candidates must be positive");
    }
    if (n > 0 && !(candidates[n] > candidates[n - 1])) {
      throw ContractError("tuning grid candidates must be strictly increasing");
    }
  }
}

namespace {

/// Index of the minimal score; ties go to the later (larger) candidate.
std::size_t pick_best(const std::vector<CandidateScore>& scores) {
  std::size_t best = 0;
  for (std::size_t n = 1; n < scores.size(); ++n) {
    if (scores[n].kl <= scores[best].kl) best = n;
  }
  return best;
}

}  // namespace

TuneResult tune_sigma(const ReferenceArray& init, const TimeSlice& slice, const TuneGrid& grid,
                      int steps, SigmaDecay decay, double sigma_floor, const MetricOptions& options) {
  grid.validate();
  std::vector<CandidateScore> scores;
  scores.reserve(grid.candidates.size());
  std::optional<ReferenceArray> best_array;
  double best_kl = 0.0;
  for (double sigma : grid.candidates) {
    const auto schedule = sigma_schedule(sigma, steps, decay, sigma_floor);
    ReferenceArray trained = train_slice(init, slice, schedule);
    const double kl = kl_slice(trained, slice, options);
    scores.push_back({sigma, kl});
    if (!best_array || kl <= best_kl) {
      best_array = std::move(trained);
      best_kl = kl;
    }
  }
  const std::size_t best = pick_best(scores);
  return {scores[best].sigma, std::move(*best_array), std::move(scores)};
}

AutoTrainResult auto_train(const DataCube& cube, const TrainConfig& config, const TuneGrid& grid,
                           const MetricOptions& options) {
  const std::size_t T = cube.slice_count();
  grid.validate();
  TrainConfig effective = config;
  effective.sigma = {grid.candidates.front()};
  effective.validate(T);

  AutoTrainResult result;
  auto& model = result.model;
  model.time_keys = cube.time_keys();
  model.feature_names = cube.feature_names();
  model.arrays.reserve(T);

  for (std::size_t t = 0; t < T; ++t) {
    const auto& s = cube.slice(t);
    const int steps = config.steps_for(t);
    const ReferenceArray init = t == 0 ? pca_init(s, config.units, config.pca_span) : model.arrays.back();
    auto tuned = tune_sigma(init, s, grid, steps, config.decay, config.sigma_floor, options);
    const auto schedule = sigma_schedule(tuned.sigma, steps, config.decay, config.sigma_floor);
    model.arrays.push_back(std::move(tuned.array));
    model.sigma_chosen.push_back(tuned.sigma);
    model.sigma_final.push_back(final_sigma(schedule, tuned.sigma));
    result.tune.per_slice.push_back({s.time_key, tuned.sigma, std::move(tuned.kl_by_candidate)});
  }
  // The recorded config carries the chosen radii so the model replays under train_sotm.
  effective.sigma = model.sigma_chosen;
  if (std::all_of(effective.sigma.begin(), effective.sigma.end(),
                  [&](double v) { return v == effective.sigma.front(); })) {
    effective.sigma.resize(1);
  }
  model.config = effective;
  result.quality = aggregate(model, cube, options);
  return result;
}

std::vector<std::string> verify_tune_report(const SotmModel& model, const DataCube& cube,
                                            const TuneReport& report, const MetricOptions& options) {
  std::vector<std::string> problems;
  auto fail = [&problems](std::size_t t, const std::string& what) {
    problems.push_back("slice " + std::to_string(t + 1) + ": " + what);
  };
  const std::size_t T = cube.slice_count();
  if (model.slice_count() != T || report.per_slice.size() != T) {
    problems.push_back("model, data and tune report disagree on the number of slices");
    return problems;
  }
  const auto& config = model.config;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& s = cube.slice(t);
    const auto& entry = report.per_slice[t];
    if (!(entry.time_key == s.time_key)) fail(t, "time key mismatch");
    if (entry.kl_by_candidate.empty()) {
      fail(t, "no candidates recorded");
      continue;
    }
    const ReferenceArray init = t == 0 ? pca_init(s, config.units, config.pca_span) : model.arrays[t - 1];
    std::vector<CandidateScore> recomputed;
    for (const auto& c : entry.kl_by_candidate) {
      const auto schedule = sigma_schedule(c.sigma, config.steps_for(t), config.decay, config.sigma_floor);
      const auto trained = train_slice(init, s, schedule);
      const double kl = kl_slice(trained, s, options);
      recomputed.push_back({c.sigma, kl});
      if (std::abs(kl - c.kl) > 1e-12 * std::max(1.0, std::abs(kl))) {
        fail(t, "recorded kl " + format_number(c.kl, 17) + " for sigma " + format_number(c.sigma, 17) +
                    " does not reproduce (" + format_number(kl, 17) + ")");
      }
      if (c.sigma == entry.chosen_sigma && !(trained == model.arrays[t])) {
        fail(t, "model array differs from the retrained winning candidate");
      }
    }
    const auto& best = recomputed[pick_best(recomputed)];
    if (best.sigma != entry.chosen_sigma) {
      fail(t, "chosen sigma " + format_number(entry.chosen_sigma, 17) + " is not the grid minimum (" +
                  format_number(best.sigma, 17) + ")");
    }
    for (const auto& c : recomputed) {
      if (c.kl < best.kl) fail(t, "candidate below chosen minimum");
    }
  }
  return problems;
}

}  // namespace sotm
