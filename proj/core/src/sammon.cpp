#include "sotm/sammon.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "sotm/error.hpp"

namespace sotm {

namespace {

constexpr double kMinDistance = 1e-12;

struct Targets {
  std::size_t n = 0;
  std::vector<double> delta;  // n * n, symmetric, clamped
  double scale = 0.0;         // sum over i < j of delta
  double mean = 0.0;
};

Targets input_distances(const std::vector<std::vector<double>>& vectors) {
  Targets t;
  t.n = vectors.size();
  t.delta.assign(t.n * t.n, 0.0);
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t j = i + 1; j < t.n; ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < vectors[i].size(); ++k) {
        const double diff = vectors[i][k] - vectors[j][k];
        sq += diff * diff;
      }
      const double dist = std::max(std::sqrt(sq), kMinDistance);
      t.delta[i * t.n + j] = t.delta[j * t.n + i] = dist;
      t.scale += dist;
      ++pairs;
    }
  }
  t.mean = pairs ? t.scale / static_cast<double>(pairs) : 0.0;
  return t;
}

double output_distance(const std::vector<double>& y, std::size_t dims, std::size_t i, std::size_t j) {
  double sq = 0.0;
  for (std::size_t k = 0; k < dims; ++k) {
    const double diff = y[i * dims + k] - y[j * dims + k];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

double stress_of(const Targets& t, const std::vector<double>& y, std::size_t dims) {
  double e = 0.0;
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t j = i + 1; j < t.n; ++j) {
      const double delta = t.delta[i * t.n + j];
      const double diff = delta - output_distance(y, dims, i, j);
      e += diff * diff / delta;
    }
  }
  return e / t.scale;
}

void gradient_of(const Targets& t, const std::vector<double>& y, std::size_t dims,
                 std::vector<double>& grad) {
  std::fill(grad.begin(), grad.end(), 0.0);
  const double factor = -2.0 / t.scale;
  for (std::size_t i = 0; i < t.n; ++i) {
    for (std::size_t j = i + 1; j < t.n; ++j) {
      const double delta = t.delta[i * t.n + j];
      const double d = std::max(output_distance(y, dims, i, j), kMinDistance);
      const double c = factor * (delta - d) / (delta * d);
      for (std::size_t k = 0; k < dims; ++k) {
        const double g = c * (y[i * dims + k] - y[j * dims + k]);
        grad[i * dims + k] += g;
        grad[j * dims + k] -= g;
      }
    }
  }
}

std::vector<double> principal_coordinates(const std::vector<std::vector<double>>& vectors,
                                          std::size_t dims) {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  const auto d = static_cast<Eigen::Index>(vectors.front().size());
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) x(i, k) = vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
  }
  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.transpose() * x);

  std::vector<double> y(static_cast<std::size_t>(n) * dims, 0.0);
  for (std::size_t c = 0; c < dims && static_cast<Eigen::Index>(c) < d; ++c) {
    Eigen::VectorXd u = solver.eigenvectors().col(d - 1 - static_cast<Eigen::Index>(c));
    Eigen::Index largest = 0;
    for (Eigen::Index k = 1; k < d; ++k) {
      if (std::abs(u(k)) > std::abs(u(largest))) largest = k;
    }
    if (u(largest) < 0.0) u = -u;
    const Eigen::VectorXd proj = x * u;
    for (Eigen::Index i = 0; i < n; ++i) y[static_cast<std::size_t>(i) * dims + c] = proj(i);
  }
  return y;
}

}  // namespace

double sammon_stress(const std::vector<std::vector<double>>& vectors, const std::vector<double>& coords,
                     std::size_t dims) {
  if (vectors.size() < 2) throw ContractError("stress needs at least two points");
  if (coords.size() != vectors.size() * dims) throw ContractError("coordinate count mismatch");
  return stress_of(input_distances(vectors), coords, dims);
}

Projection sammon_project(const std::vector<std::vector<double>>& vectors, const SammonOptions& options) {
  if (vectors.size() < 2) throw ContractError("Sammon projection needs at least two points");
  if (options.dims == 0) throw ContractError("output dimension must be positive");
  const std::size_t dim = vectors.front().size();
  if (dim == 0) throw ContractError("input vectors are empty");
  for (const auto& v : vectors) {
    if (v.size() != dim) throw ContractError("input vectors differ in dimension");
    for (double c : v) {
      if (!std::isfinite(c)) throw ContractError("input vectors must be finite");
    }
  }

  const Targets targets = input_distances(vectors);
  if (!(targets.mean > kMinDistance)) throw ContractError("all input vectors are identical");

  const std::size_t dims = options.dims;
  Projection p;
  p.count = vectors.size();
  p.dims = dims;
  p.coords = principal_coordinates(vectors, dims);
  p.stress = stress_of(targets, p.coords, dims);
  p.stress_history.push_back(p.stress);

  std::vector<double> grad(p.coords.size());
  std::vector<double> trial(p.coords.size());
  auto refresh_gradient = [&] {
    gradient_of(targets, p.coords, dims, grad);
    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    return gmax;
  };
  double gmax = refresh_gradient();
  double step = gmax > 0.0 ? 0.1 * targets.mean / gmax : 0.0;

  while (p.iterations < options.max_iters && p.stress > 0.0 && gmax > 0.0) {
    // Stop once the largest coordinate move is below double resolution.
    if (step * gmax < 1e-15 * targets.mean) break;
    ++p.iterations;
    for (std::size_t k = 0; k < trial.size(); ++k) trial[k] = p.coords[k] - step * grad[k];
    const double candidate = stress_of(targets, trial, dims);
    if (!(candidate < p.stress)) {
      step *= 0.5;
      continue;
    }
    const double improvement = (p.stress - candidate) / p.stress;
    p.coords.swap(trial);
    p.stress = candidate;
    p.stress_history.push_back(candidate);
    if (improvement < options.tol) break;
    gmax = refresh_gradient();
    step *= 1.2;
  }
  return p;
}

}  // namespace sotm
