#pragma once

// Synthetic data cubes shared by the tests, the acceptance suite and the
// benchmarks.

#include <cmath>
#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "sotm/datacube.hpp"

namespace sotm::testing {

using Rng = std::mt19937_64;

inline std::vector<std::string> feature_names(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < d; ++k) names.push_back("x" + std::to_string(k + 1));
  return names;
}

inline std::string entity_name(std::size_t j) { return "e" + std::to_string(j + 1); }

/// N observations with independent uniform(lo, hi) features.
inline TimeSlice uniform_slice(Rng& rng, std::size_t n, std::size_t d, double lo = -1.0, double hi = 1.0,
                               TimeKey key = TimeKey::integer(1)) {
  std::uniform_real_distribution<double> u(lo, hi);
  TimeSlice s{std::move(key), {}};
  for (std::size_t j = 0; j < n; ++j) {
    Observation obs{entity_name(j), std::vector<double>(d), 1.0};
    for (auto& v : obs.features) v = u(rng);
    s.observations.push_back(std::move(obs));
  }
  return s;
}

/// Same as uniform_slice with weights drawn from uniform(0.1, 10).
inline TimeSlice weighted_slice(Rng& rng, std::size_t n, std::size_t d) {
  auto s = uniform_slice(rng, n, d);
  std::uniform_real_distribution<double> w(0.1, 10.0);
  for (auto& obs : s.observations) obs.weight = w(rng);
  return s;
}

/// Entities drawn around a few group centres; after `break_at` (zero-based,
/// if below `slices`) every entity shifts by `shift` in every feature.
/// Weights are per-slice shares of a lognormal "size", summing to one.
struct PanelSpec {
  std::size_t entities = 28;
  std::size_t features = 14;
  std::size_t slices = 22;
  std::size_t groups = 3;
  double noise = 0.3;
  double drift = 0.02;        // per-slice drift of the group centres
  std::size_t break_at = static_cast<std::size_t>(-1);
  double shift = 0.0;
  bool weighted = true;
  std::int64_t first_key = 1;
};

inline DataCube make_panel(Rng& rng, const PanelSpec& spec) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> centres(spec.groups, std::vector<double>(spec.features));
  for (auto& c : centres) {
    for (auto& v : c) v = 2.0 * gauss(rng);
  }
  std::vector<std::vector<double>> drift(spec.groups, std::vector<double>(spec.features));
  for (auto& dv : drift) {
    for (auto& v : dv) v = spec.drift * gauss(rng);
  }
  std::vector<std::size_t> group_of(spec.entities);
  std::vector<double> size_of(spec.entities);
  for (std::size_t j = 0; j < spec.entities; ++j) {
    group_of[j] = j % spec.groups;
    size_of[j] = std::exp(gauss(rng));
  }

  std::vector<TimeSlice> slices;
  for (std::size_t t = 0; t < spec.slices; ++t) {
    TimeSlice s{TimeKey::integer(spec.first_key + static_cast<std::int64_t>(t)), {}};
    double total = 0.0;
    for (std::size_t j = 0; j < spec.entities; ++j) total += size_of[j];
    for (std::size_t j = 0; j < spec.entities; ++j) {
      const auto g = group_of[j];
      Observation obs{entity_name(j), std::vector<double>(spec.features),
                      spec.weighted ? size_of[j] / total : 1.0};
      for (std::size_t k = 0; k < spec.features; ++k) {
        double v = centres[g][k] + drift[g][k] * static_cast<double>(t) + spec.noise * gauss(rng);
        if (t >= spec.break_at) v += spec.shift;
        obs.features[k] = v;
      }
      s.observations.push_back(std::move(obs));
    }
    slices.push_back(std::move(s));
  }
  return DataCube(feature_names(spec.features), std::move(slices));
}

/// The same slice repeated `slices` times.
inline DataCube make_identical_slices(Rng& rng, std::size_t slices, std::size_t n, std::size_t d) {
  const auto base = uniform_slice(rng, n, d);
  std::vector<TimeSlice> out;
  for (std::size_t t = 0; t < slices; ++t) {
    TimeSlice s = base;
    s.time_key = TimeKey::integer(static_cast<std::int64_t>(t + 1));
    out.push_back(std::move(s));
  }
  return DataCube(feature_names(d), std::move(out));
}

/// Two 1-D Gaussian clusters whose means move linearly over time.
struct DriftSpec {
  std::size_t slices = 10;
  std::size_t per_cluster = 200;
  double sd = 1.0;
  double left_start = 0.0;
  double left_end = 5.0;
  double right_start = 20.0;
  double right_end = 30.0;
};

struct DriftCube {
  DataCube cube;
  std::vector<double> left_means;   // realized sample means
  std::vector<double> right_means;
  std::vector<double> left_true;    // generating means
  std::vector<double> right_true;
};

inline DriftCube make_drifting_clusters(Rng& rng, const DriftSpec& spec) {
  std::normal_distribution<double> gauss(0.0, spec.sd);
  std::vector<TimeSlice> slices;
  DriftCube result{DataCube({"x"}, {TimeSlice{TimeKey::integer(1), {{"a", {0.0}, 1.0}}}}), {}, {}, {}, {}};
  for (std::size_t t = 0; t < spec.slices; ++t) {
    const double f = spec.slices > 1 ? static_cast<double>(t) / static_cast<double>(spec.slices - 1) : 0.0;
    const double left = spec.left_start + f * (spec.left_end - spec.left_start);
    const double right = spec.right_start + f * (spec.right_end - spec.right_start);
    TimeSlice s{TimeKey::integer(static_cast<std::int64_t>(t + 1)), {}};
    double left_sum = 0.0;
    double right_sum = 0.0;
    for (std::size_t j = 0; j < spec.per_cluster; ++j) {
      const double a = left + gauss(rng);
      const double b = right + gauss(rng);
      left_sum += a;
      right_sum += b;
      s.observations.push_back({"l" + std::to_string(j), {a}, 1.0});
      s.observations.push_back({"r" + std::to_string(j), {b}, 1.0});
    }
    result.left_means.push_back(left_sum / static_cast<double>(spec.per_cluster));
    result.right_means.push_back(right_sum / static_cast<double>(spec.per_cluster));
    result.left_true.push_back(left);
    result.right_true.push_back(right);
    slices.push_back(std::move(s));
  }
  result.cube = DataCube({"x"}, std::move(slices));
  return result;
}

}  // namespace sotm::testing
