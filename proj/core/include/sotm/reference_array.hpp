#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sotm {

/// One-dimensional array of M reference vectors of dimension d. Unit i
/// (zero-based) sits at grid coordinate i + 1. Immutable once built.
class ReferenceArray {
 public:
  /// `values` holds units row-major (M * d entries). Throws ContractError on
  /// shape mismatch or non-finite components.
  ReferenceArray(std::size_t units, std::size_t dim, std::vector<double> values);

  std::size_t units() const noexcept { return units_; }
  std::size_t dim() const noexcept { return dim_; }

  std::span<const double> unit(std::size_t i) const noexcept {
    return {values_.data() + i * dim_, dim_};
  }
  double at(std::size_t i, std::size_t k) const noexcept { return values_[i * dim_ + k]; }
  std::span<const double> values() const noexcept { return values_; }

  static double grid_coord(std::size_t i) noexcept { return static_cast<double>(i + 1); }

  friend bool operator==(const ReferenceArray&, const ReferenceArray&) = default;

 private:
  std::size_t units_;
  std::size_t dim_;
  std::vector<double> values_;
};

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;
double distance(std::span<const double> a, std::span<const double> b) noexcept;

struct Bmu {
  std::size_t index;
  double distance;
};

/// Nearest unit by Euclidean distance; ties go to the smallest index.
Bmu find_bmu(std::span<const double> x, const ReferenceArray& array);

/// Nearest unit other than the BMU; ties go to the smallest index.
/// Requires at least two units.
std::size_t second_bmu(std::span<const double> x, const ReferenceArray& array);

/// Both matches in one pass; same tie rules as find_bmu / second_bmu.
struct BmuPair {
  Bmu first;
  Bmu second;
};
BmuPair find_two_bmus(std::span<const double> x, const ReferenceArray& array);

/// Gaussian kernel over grid distance: exp(-(r_b - r_i)^2 / (2 sigma^2)).
double neighborhood(std::size_t i, std::size_t b, double sigma, const ReferenceArray& array);

}  // namespace sotm
