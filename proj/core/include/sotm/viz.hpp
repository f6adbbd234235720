#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "sotm/sammon.hpp"
#include "sotm/training.hpp"

namespace sotm {

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  std::string hex() const;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

double rgb_distance(const Rgb& a, const Rgb& b) noexcept;

/// Joint Sammon projection of all T*M reference vectors, in (t, i) order.
/// When every unit is identical all coordinates are zero and stress is zero.
Projection project_units(const SotmModel& model, const SammonOptions& options = {});

/// Colour per (t, i): projection rescaled to the unit square, axis 1 driving
/// hue and axis 2 lightness. Index is t * M + i.
std::vector<Rgb> unit_colors(const SotmModel& model, const Projection& projection);
std::vector<Rgb> unit_colors(const SotmModel& model);

struct FeaturePlane {
  std::size_t feature_index = 0;
  std::string feature_name;
  std::size_t slices = 0;
  std::size_t units = 0;
  /// slices * units, row-major by time.
  std::vector<double> values;
  double min = 0.0;
  double max = 0.0;

  double at(std::size_t t, std::size_t i) const { return values[t * units + i]; }
};

/// Component `k` (zero-based) of every unit. Throws RangeError for k >= d.
FeaturePlane feature_plane(const SotmModel& model, std::size_t k);

struct SvgLayout {
  double cell_width = 26.0;
  double cell_height = 22.0;
  std::string title;
};

/// Time runs left to right, units top to bottom. Each grid cell is a
/// `<rect class="cell">`.
std::string render_map_svg(const SotmModel& model, const std::vector<Rgb>& colors,
                           const SvgLayout& layout = {});
std::string render_plane_svg(const SotmModel& model, const FeaturePlane& plane,
                             const SvgLayout& layout = {});

/// Blue ramp used by feature planes; `v` in [0, 1], darker is higher.
Rgb blue_ramp(double v);

/// `time_key,unit,x,y` per unit, time-major.
void write_topology_csv(const SotmModel& model, const Projection& projection, std::ostream& out);
/// `time_key,unit,<feature name>` per unit.
void write_plane_csv(const SotmModel& model, const FeaturePlane& plane, std::ostream& out);

}  // namespace sotm
