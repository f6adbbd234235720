#include "sotm/quality.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "sotm/error.hpp"
#include "sotm/file_io.hpp"

namespace sotm {

namespace {

void check_slice(const ReferenceArray& array, const TimeSlice& slice) {
  if (slice.dim() != array.dim()) {
    throw ContractError("slice dimension " + std::to_string(slice.dim()) +
                        " does not match reference array dimension " + std::to_string(array.dim()));
  }
}

/// Averages per-observation terms with 1/N or with the instance weights.
class Averager {
 public:
  explicit Averager(bool weighted) : weighted_(weighted) {}

  void add(double term, double weight) {
    const double w = weighted_ ? weight : 1.0;
    sum_ += w * term;
    mass_ += w;
  }

  double mean() const { return mass_ > 0.0 ? sum_ / mass_ : 0.0; }

 private:
  bool weighted_;
  double sum_ = 0.0;
  double mass_ = 0.0;
};

double path_length(const ReferenceArray& array, std::size_t from, std::size_t to) {
  const std::size_t lo = std::min(from, to);
  const std::size_t hi = std::max(from, to);
  double length = 0.0;
  for (std::size_t g = lo; g < hi; ++g) length += distance(array.unit(g), array.unit(g + 1));
  return length;
}

}  // namespace

double qe_slice(const ReferenceArray& array, const TimeSlice& slice, const MetricOptions& options) {
  check_slice(array, slice);
  Averager avg(options.weighted_metrics);
  for (const auto& obs : slice.observations) avg.add(find_bmu(obs.features, array).distance, obs.weight);
  return avg.mean();
}

double dm_slice(const ReferenceArray& array, const TimeSlice& slice, double sigma,
                const MetricOptions& options) {
  check_slice(array, slice);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ContractError("sigma must be positive");
  const std::size_t M = array.units();
  Averager avg(options.weighted_metrics);
  for (const auto& obs : slice.observations) {
    const auto bmu = find_bmu(obs.features, array);
    double term = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      const double h = neighborhood(i, bmu.index, sigma, array);
      term += options.classical_distortion ? h * squared_distance(obs.features, array.unit(i))
                                           : h * bmu.distance;
    }
    avg.add(term / static_cast<double>(M), obs.weight);
  }
  return avg.mean();
}

double te_slice(const ReferenceArray& array, const TimeSlice& slice, const MetricOptions& options) {
  check_slice(array, slice);
  Averager avg(options.weighted_metrics);
  for (const auto& obs : slice.observations) {
    const auto pair = find_two_bmus(obs.features, array);
    const auto gap = pair.first.index > pair.second.index ? pair.first.index - pair.second.index
                                                          : pair.second.index - pair.first.index;
    avg.add(gap != 1 ? 1.0 : 0.0, obs.weight);
  }
  return avg.mean();
}

double kl_slice(const ReferenceArray& array, const TimeSlice& slice, const MetricOptions& options) {
  check_slice(array, slice);
  Averager avg(options.weighted_metrics);
  for (const auto& obs : slice.observations) {
    const auto pair = find_two_bmus(obs.features, array);
    avg.add(pair.first.distance + path_length(array, pair.first.index, pair.second.index), obs.weight);
  }
  return avg.mean();
}

double sc_slice(const ReferenceArray& current, const ReferenceArray& previous) {
  if (current.units() != previous.units() || current.dim() != previous.dim()) {
    throw ContractError("structural change needs arrays of equal shape");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < current.units(); ++i) total += distance(current.unit(i), previous.unit(i));
  return total / static_cast<double>(current.units());
}

QualityReport aggregate(const SotmModel& model, const DataCube& cube, const MetricOptions& options) {
  model.validate();
  const std::size_t T = model.slice_count();
  if (cube.slice_count() != T) {
    throw ContractError("model has " + std::to_string(T) + " slices, data has " +
                        std::to_string(cube.slice_count()));
  }
  if (cube.dim() != model.dim()) {
    throw ContractError("model has dimension " + std::to_string(model.dim()) + ", data has " +
                        std::to_string(cube.dim()));
  }

  QualityReport report;
  report.per_slice.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    const auto& s = cube.slice(t);
    if (!(s.time_key == model.time_keys[t])) {
      throw ContractError("time key mismatch at slice " + std::to_string(t + 1) + ": model '" +
                          model.time_keys[t].label + "', data '" + s.time_key.label + "'");
    }
    const auto& a = model.arrays[t];
    SliceQuality q;
    q.time_key = s.time_key;
    q.n = s.size();
    q.sigma = model.sigma_final[t];
    q.qe = qe_slice(a, s, options);
    q.dm = dm_slice(a, s, q.sigma, options);
    q.te = te_slice(a, s, options);
    q.kl = kl_slice(a, s, options);
    if (t > 0) q.sc = sc_slice(a, model.arrays[t - 1]);
    report.per_slice.push_back(std::move(q));
  }

  auto& agg = report.aggregate;
  for (const auto& q : report.per_slice) {
    agg.qe += q.qe;
    agg.dm += q.dm;
    agg.te += q.te;
    agg.kl += q.kl;
  }
  const double inv = 1.0 / static_cast<double>(T);
  agg.qe *= inv;
  agg.dm *= inv;
  agg.te *= inv;
  agg.kl *= inv;
  return report;
}

void write_metrics_csv(const QualityReport& report, std::ostream& out) {
  constexpr int kDigits = 10;
  out << "time_key,n,sigma,qe,dm,te,kl,sc\n";
  std::size_t total_n = 0;
  for (const auto& q : report.per_slice) {
    out << q.time_key.label << ',' << q.n << ',' << format_number(q.sigma, kDigits) << ','
        << format_number(q.qe, kDigits) << ',' << format_number(q.dm, kDigits) << ','
        << format_number(q.te, kDigits) << ',' << format_number(q.kl, kDigits) << ',';
    if (q.sc) out << format_number(*q.sc, kDigits);
    out << '\n';
    total_n += q.n;
  }
  const auto& a = report.aggregate;
  out << "aggregate," << total_n << ",," << format_number(a.qe, kDigits) << ','
      << format_number(a.dm, kDigits) << ',' << format_number(a.te, kDigits) << ','
      << format_number(a.kl, kDigits) << ",\n";
}

}  // namespace sotm
