#include "sotm/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "sotm/diagnostics.hpp"
#include "sotm/error.hpp"

namespace sotm {

std::string to_string(SigmaDecay decay) {
  return decay == SigmaDecay::constant ? "constant" : "linear";
}

SigmaDecay parse_sigma_decay(const std::string& text) {
  if (text == "constant") return SigmaDecay::constant;
  if (text == "linear" || text == "linear-to-floor") return SigmaDecay::linear_to_floor;
  throw ContractError("unknown sigma decay '" + text + "' (expected constant or linear)");
}

void TrainConfig::validate(std::size_t slice_count) const {
  if (units < 2) throw ContractError("unit count must be at least 2");
  if (steps.empty()) throw ContractError("steps list is empty");
  if (steps.size() != 1 && steps.size() != slice_count) {
    throw ContractError("steps list has " + std::to_string(steps.size()) + " entries for " +
                        std::to_string(slice_count) + " slices");
  }
  // Zero steps is allowed past the first slice (pure copy of the previous array).
  for (int s : steps) {
    if (s < 0) throw ContractError("steps must be non-negative");
  }
  if (sigma.empty()) throw ContractError("sigma list is empty");
  if (sigma.size() != 1 && sigma.size() != slice_count) {
    throw ContractError("sigma list has " + std::to_string(sigma.size()) + " entries for " +
                        std::to_string(slice_count) + " slices");
  }
  for (double s : sigma) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ContractError("sigma values must be positive");
  }
  if (!(sigma_floor > 0.0) || !std::isfinite(sigma_floor)) {
    throw ContractError("sigma_floor must be positive");
  }
  if (!(pca_span > 0.0) || !std::isfinite(pca_span)) throw ContractError("pca_span must be positive");
}

int TrainConfig::steps_for(std::size_t t) const {
  return steps.size() == 1 ? steps.front() : steps.at(t);
}

double TrainConfig::sigma_for(std::size_t t) const {
  return sigma.size() == 1 ? sigma.front() : sigma.at(t);
}

std::vector<double> sigma_schedule(double start, int steps, SigmaDecay decay, double floor) {
  if (!(start > 0.0)) throw ContractError("sigma must be positive");
  if (steps < 0) throw ContractError("steps must be non-negative");
  std::vector<double> schedule(static_cast<std::size_t>(steps), start);
  if (decay == SigmaDecay::constant || steps < 2) return schedule;
  const double end = std::min(start, std::max(floor, 0.1 * start));
  const double last = static_cast<double>(steps - 1);
  for (int s = 0; s < steps; ++s) {
    schedule[static_cast<std::size_t>(s)] = start + (end - start) * (static_cast<double>(s) / last);
  }
  return schedule;
}

double final_sigma(std::span<const double> schedule, double start) {
  return schedule.empty() ? start : schedule.back();
}

void SotmModel::validate() const {
  const std::size_t T = arrays.size();
  if (T == 0) throw SchemaError("model has no arrays");
  if (time_keys.size() != T) throw SchemaError("time_keys length does not match arrays");
  if (sigma_chosen.size() != T) throw SchemaError("sigma_chosen length does not match arrays");
  if (sigma_final.size() != T) throw SchemaError("sigma_final length does not match arrays");
  const std::size_t M = arrays.front().units();
  const std::size_t d = arrays.front().dim();
  if (M < 2) throw SchemaError("model needs at least two units");
  if (feature_names.size() != d) throw SchemaError("feature_names length does not match d");
  for (const auto& a : arrays) {
    if (a.units() != M || a.dim() != d) throw SchemaError("arrays differ in shape");
  }
  for (std::size_t t = 0; t < T; ++t) {
    if (!(sigma_chosen[t] > 0.0) || !(sigma_final[t] > 0.0)) {
      throw SchemaError("sigma values must be positive");
    }
  }
}

ReferenceArray pca_init(const TimeSlice& slice, std::size_t units, double span) {
  if (units < 1) throw ContractError("unit count must be positive");
  if (!(span > 0.0)) throw ContractError("pca span must be positive");
  if (slice.observations.empty()) throw ContractError("cannot initialize from an empty slice");
  const std::size_t d = slice.dim();
  const double total = slice.total_weight();
  if (!(total > 0.0)) throw ContractError("slice has no positive weight");

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
  double scale = 0.0;
  for (const auto& obs : slice.observations) {
    const Eigen::Map<const Eigen::VectorXd> x(obs.features.data(), static_cast<Eigen::Index>(d));
    mean += obs.weight * x;
    scale = std::max(scale, x.cwiseAbs().maxCoeff());
  }
  mean /= total;

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (const auto& obs : slice.observations) {
    const Eigen::Map<const Eigen::VectorXd> x(obs.features.data(), static_cast<Eigen::Index>(d));
    const Eigen::VectorXd c = x - mean;
    cov.noalias() += obs.weight * c * c.transpose();
  }
  cov /= total;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::Index top = static_cast<Eigen::Index>(d) - 1;
  const double variance = solver.eigenvalues()(top);
  const double stddev = variance > 0.0 ? std::sqrt(variance) : 0.0;

  std::vector<double> values(units * d);
  const double centre = (static_cast<double>(units) + 1.0) / 2.0;
  if (!(stddev > 1e-12 * scale)) {
    warn("zero-variance slice '" + slice.time_key.label +
         "': units placed at the mean with ordered 1e-6 offsets");
    for (std::size_t i = 0; i < units; ++i) {
      for (std::size_t k = 0; k < d; ++k) values[i * d + k] = mean(static_cast<Eigen::Index>(k));
      values[i * d] += 1e-6 * (static_cast<double>(i + 1) - centre);
    }
    return ReferenceArray(units, d, std::move(values));
  }

  Eigen::VectorXd u = solver.eigenvectors().col(top);
  Eigen::Index largest = 0;
  for (Eigen::Index k = 1; k < u.size(); ++k) {
    if (std::abs(u(k)) > std::abs(u(largest))) largest = k;
  }
  if (u(largest) < 0.0) u = -u;

  const double extent = span * stddev;
  for (std::size_t i = 0; i < units; ++i) {
    const double alpha =
        units == 1 ? 0.0
                   : -extent + 2.0 * extent * static_cast<double>(i) / static_cast<double>(units - 1);
    for (std::size_t k = 0; k < d; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      values[i * d + k] = mean(kk) + alpha * u(kk);
    }
  }
  return ReferenceArray(units, d, std::move(values));
}

ReferenceArray batch_update(const ReferenceArray& array, const TimeSlice& slice, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ContractError("sigma must be positive");
  const std::size_t M = array.units();
  const std::size_t d = array.dim();
  if (slice.dim() != d) {
    throw ContractError("slice dimension " + std::to_string(slice.dim()) +
                        " does not match reference array dimension " + std::to_string(d));
  }

  // Voronoi sums per BMU, accumulated in observation order.
  std::vector<double> sums(M * d, 0.0);
  std::vector<double> mass(M, 0.0);
  for (const auto& obs : slice.observations) {
    if (obs.weight == 0.0) continue;
    const std::size_t b = find_bmu(obs.features, array).index;
    mass[b] += obs.weight;
    for (std::size_t k = 0; k < d; ++k) sums[b * d + k] += obs.weight * obs.features[k];
  }

  std::vector<std::size_t> occupied;
  for (std::size_t b = 0; b < M; ++b) {
    if (mass[b] > 0.0) occupied.push_back(b);
  }
  if (occupied.empty()) throw ContractError("slice weights sum to zero");

  // Each unit's kernel is rescaled by its value at the nearest occupied BMU.
  // The ratio is unchanged and the denominator cannot underflow for small sigma.
  const double two_sigma_sq = 2.0 * sigma * sigma;
  std::vector<double> values(M * d, 0.0);
  std::vector<double> num(d);
  for (std::size_t i = 0; i < M; ++i) {
    double nearest_sq = std::numeric_limits<double>::infinity();
    for (std::size_t b : occupied) {
      const double dr = ReferenceArray::grid_coord(b) - ReferenceArray::grid_coord(i);
      nearest_sq = std::min(nearest_sq, dr * dr);
    }
    std::fill(num.begin(), num.end(), 0.0);
    double den = 0.0;
    for (std::size_t b : occupied) {
      const double dr = ReferenceArray::grid_coord(b) - ReferenceArray::grid_coord(i);
      const double h = std::exp(-(dr * dr - nearest_sq) / two_sigma_sq);
      den += h * mass[b];
      for (std::size_t k = 0; k < d; ++k) num[k] += h * sums[b * d + k];
    }
    for (std::size_t k = 0; k < d; ++k) values[i * d + k] = num[k] / den;
  }
  return ReferenceArray(M, d, std::move(values));
}

ReferenceArray train_slice(const ReferenceArray& init, const TimeSlice& slice,
                           std::span<const double> sigma_schedule) {
  ReferenceArray current = init;
  for (double sigma : sigma_schedule) current = batch_update(current, slice, sigma);
  return current;
}

SotmModel train_sotm(const DataCube& cube, const TrainConfig& config) {
  const std::size_t T = cube.slice_count();
  config.validate(T);

  SotmModel model;
  model.config = config;
  model.time_keys = cube.time_keys();
  model.feature_names = cube.feature_names();
  model.arrays.reserve(T);

  for (std::size_t t = 0; t < T; ++t) {
    const auto& s = cube.slice(t);
    const double start = config.sigma_for(t);
    const auto schedule = sigma_schedule(start, config.steps_for(t), config.decay, config.sigma_floor);
    const ReferenceArray init = t == 0 ? pca_init(s, config.units, config.pca_span) : model.arrays.back();
    model.arrays.push_back(train_slice(init, s, schedule));
    model.sigma_chosen.push_back(start);
    model.sigma_final.push_back(final_sigma(schedule, start));
  }
  return model;
}

}  // namespace sotm
