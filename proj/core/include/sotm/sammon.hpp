#pragma once

#include <cstddef>
#include <vector>

namespace sotm {

struct SammonOptions {
  std::size_t dims = 2;
  int max_iters = 10000;
  /// Stop once an accepted step improves stress by less than this fraction.
  double tol = 1e-10;
};

struct Projection {
  std::size_t count = 0;
  std::size_t dims = 0;
  /// count * dims, row-major.
  std::vector<double> coords;
  double stress = 0.0;
  /// Stress after initialization and after every accepted step.
  std::vector<double> stress_history;
  int iterations = 0;

  double at(std::size_t i, std::size_t k) const { return coords[i * dims + k]; }
};

/// Sammon stress of a candidate embedding; input distances below 1e-12 are
/// clamped to 1e-12 in denominators.
double sammon_stress(const std::vector<std::vector<double>>& vectors,
                     const std::vector<double>& coords, std::size_t dims);

/// Nonlinear projection minimizing Sammon stress. Starts from the leading
/// principal components and runs gradient descent, halving the step and
/// rejecting it whenever stress would rise.
Projection sammon_project(const std::vector<std::vector<double>>& vectors,
                          const SammonOptions& options = {});

}  // namespace sotm
