#include "sotm/reference_array.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sotm/error.hpp"

namespace sotm {

ReferenceArray::ReferenceArray(std::size_t units, std::size_t dim, std::vector<double> values)
    : units_(units), dim_(dim), values_(std::move(values)) {
  if (units == 0 || dim == 0) throw ContractError("reference array needs at least one unit and one dimension");
  if (values_.size() != units * dim) {
    throw ContractError("reference array expects " + std::to_string(units * dim) +
                        " values, got " + std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ContractError("reference array has a non-finite component");
  }
}

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += diff * diff;
  }
  return sum;
}

double distance(std::span<const double> a, std::span<const double> b) noexcept {
  return std::sqrt(squared_distance(a, b));
}

namespace {

void check_dim(std::span<const double> x, const ReferenceArray& array) {
  if (x.size() != array.dim()) {
    throw ContractError("vector has dimension " + std::to_string(x.size()) +
                        ", reference array has " + std::to_string(array.dim()));
  }
}

}  // namespace

Bmu find_bmu(std::span<const double> x, const ReferenceArray& array) {
  check_dim(x, array);
  std::size_t best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < array.units(); ++i) {
    const double sq = squared_distance(x, array.unit(i));
    if (sq < best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  return {best, std::sqrt(best_sq)};
}

BmuPair find_two_bmus(std::span<const double> x, const ReferenceArray& array) {
  check_dim(x, array);
  if (array.units() < 2) throw ContractError("second BMU requires at least two units");
  std::size_t first = 0;
  std::size_t second = 0;
  double first_sq = std::numeric_limits<double>::infinity();
  double second_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < array.units(); ++i) {
    const double sq = squared_distance(x, array.unit(i));
    if (sq < first_sq) {
      second = first;
      second_sq = first_sq;
      first = i;
      first_sq = sq;
    } else if (sq < second_sq) {
      second = i;
      second_sq = sq;
    }
  }
  return {{first, std::sqrt(first_sq)}, {second, std::sqrt(second_sq)}};
}

std::size_t second_bmu(std::span<const double> x, const ReferenceArray& array) {
  return find_two_bmus(x, array).second.index;
}

double neighborhood(std::size_t i, std::size_t b, double sigma, const ReferenceArray& array) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ContractError("neighborhood radius must be positive and finite");
  }
  if (i >= array.units() || b >= array.units()) throw ContractError("unit index out of range");
  const double dr = ReferenceArray::grid_coord(b) - ReferenceArray::grid_coord(i);
  return std::exp(-(dr * dr) / (2.0 * sigma * sigma));
}

}  // namespace sotm
