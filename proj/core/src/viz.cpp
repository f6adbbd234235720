#include "sotm/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "sotm/error.hpp"
#include "sotm/file_io.hpp"

namespace sotm {

namespace {

constexpr double kHueSpan = 300.0;  // degrees; stops short of wrapping back to red
constexpr double kSaturation = 0.85;
constexpr double kLightnessLow = 0.25;
constexpr double kLightnessHigh = 0.75;

std::string num(double v) { return format_number(v, 6); }

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

Rgb hsl_to_rgb(double hue_deg, double s, double l) {
  const double c = (1.0 - std::abs(2.0 * l - 1.0)) * s;
  const double hp = hue_deg / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else if (hp < 4) { g = x; b = c; }
  else if (hp < 5) { r = x; b = c; }
  else { r = c; b = x; }
  const double m = l - c / 2.0;
  return {r + m, g + m, b + m};
}

Rgb color_at(double u1, double u2) {
  return hsl_to_rgb(kHueSpan * u1, kSaturation, kLightnessLow + (kLightnessHigh - kLightnessLow) * u2);
}

struct Frame {
  double left = 56.0;
  double top = 34.0;
  double cell_w = 0.0;
  double cell_h = 0.0;
  double grid_w = 0.0;
  double grid_h = 0.0;
  double legend_x = 0.0;
  double width = 0.0;
  double height = 0.0;
};

Frame make_frame(std::size_t slices, std::size_t units, const SvgLayout& layout) {
  Frame f;
  f.cell_w = layout.cell_width;
  f.cell_h = layout.cell_height;
  f.grid_w = f.cell_w * static_cast<double>(slices);
  f.grid_h = f.cell_h * static_cast<double>(units);
  f.legend_x = f.left + f.grid_w + 24.0;
  f.width = f.legend_x + 150.0;
  f.height = f.top + std::max(f.grid_h, 160.0) + 80.0;
  return f;
}

void open_document(std::ostringstream& svg, const Frame& f, const std::string& title) {
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(f.width)
      << "\" height=\"" << num(f.height) << "\" viewBox=\"0 0 " << num(f.width) << ' ' << num(f.height)
      << "\" font-family=\"sans-serif\" font-size=\"10\">\n"
      << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << num(f.width) << "\" height=\""
      << num(f.height) << "\" fill=\"#ffffff\"/>\n";
  if (!title.empty()) {
    svg << "<text class=\"title\" x=\"" << num(f.left) << "\" y=\"20\" font-size=\"13\">"
        << xml_escape(title) << "</text>\n";
  }
}

void axis_labels(std::ostringstream& svg, const Frame& f, const SotmModel& model) {
  svg << "<g class=\"unit-labels\" text-anchor=\"end\">\n";
  for (std::size_t i = 0; i < model.units(); ++i) {
    const double y = f.top + f.cell_h * (static_cast<double>(i) + 0.5) + 3.5;
    svg << "<text x=\"" << num(f.left - 6.0) << "\" y=\"" << num(y) << "\">" << i + 1 << "</text>\n";
  }
  svg << "</g>\n<g class=\"time-labels\" text-anchor=\"end\">\n";
  const double base = f.top + f.grid_h + 10.0;
  for (std::size_t t = 0; t < model.slice_count(); ++t) {
    const double x = f.left + f.cell_w * (static_cast<double>(t) + 0.5) + 3.0;
    svg << "<text class=\"time-label\" x=\"" << num(x) << "\" y=\"" << num(base) << "\" transform=\"rotate(-60 "
        << num(x) << ' ' << num(base) << ")\">" << xml_escape(model.time_keys[t].label) << "</text>\n";
  }
  svg << "</g>\n";
}

void cell(std::ostringstream& svg, const Frame& f, std::size_t t, std::size_t i, const Rgb& color,
          const std::string& tooltip) {
  svg << "<rect class=\"cell\" x=\"" << num(f.left + f.cell_w * static_cast<double>(t)) << "\" y=\""
      << num(f.top + f.cell_h * static_cast<double>(i)) << "\" width=\"" << num(f.cell_w) << "\" height=\""
      << num(f.cell_h) << "\" fill=\"" << color.hex() << "\" stroke=\"#ffffff\" stroke-width=\"0.5\"><title>"
      << xml_escape(tooltip) << "</title></rect>\n";
}

}  // namespace

std::string Rgb::hex() const {
  auto channel = [](double v) {
    return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", channel(r), channel(g), channel(b));
  return buf;
}

double rgb_distance(const Rgb& a, const Rgb& b) noexcept {
  return std::sqrt((a.r - b.r) * (a.r - b.r) + (a.g - b.g) * (a.g - b.g) + (a.b - b.b) * (a.b - b.b));
}

Rgb blue_ramp(double v) {
  v = std::clamp(v, 0.0, 1.0);
  const Rgb light{0.969, 0.984, 1.0};
  const Rgb dark{0.031, 0.188, 0.420};
  return {light.r + (dark.r - light.r) * v, light.g + (dark.g - light.g) * v,
          light.b + (dark.b - light.b) * v};
}

Projection project_units(const SotmModel& model, const SammonOptions& options) {
  model.validate();
  std::vector<std::vector<double>> vectors;
  vectors.reserve(model.slice_count() * model.units());
  for (const auto& a : model.arrays) {
    for (std::size_t i = 0; i < a.units(); ++i) vectors.emplace_back(a.unit(i).begin(), a.unit(i).end());
  }
  const bool identical = std::all_of(vectors.begin(), vectors.end(),
                                     [&](const auto& v) { return distance(v, vectors.front()) <= 1e-12; });
  if (identical) {
    Projection p;
    p.count = vectors.size();
    p.dims = options.dims;
    p.coords.assign(p.count * p.dims, 0.0);
    p.stress_history = {0.0};
    return p;
  }
  return sammon_project(vectors, options);
}

std::vector<Rgb> unit_colors(const SotmModel& model, const Projection& projection) {
  const std::size_t n = model.slice_count() * model.units();
  if (projection.count != n || projection.dims < 2) {
    throw ContractError("projection does not match the model's units");
  }
  double lo[2] = {projection.at(0, 0), projection.at(0, 1)};
  double hi[2] = {lo[0], lo[1]};
  for (std::size_t p = 0; p < n; ++p) {
    for (int k = 0; k < 2; ++k) {
      lo[k] = std::min(lo[k], projection.at(p, static_cast<std::size_t>(k)));
      hi[k] = std::max(hi[k], projection.at(p, static_cast<std::size_t>(k)));
    }
  }
  // One scale for both axes keeps colour differences proportional to
  // projected distances; the minor axis is centred.
  const double range = std::max(hi[0] - lo[0], hi[1] - lo[1]);
  std::vector<Rgb> colors;
  colors.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    double u[2] = {0.5, 0.5};
    if (range > 0.0) {
      for (int k = 0; k < 2; ++k) {
        const double mid = 0.5 * (lo[k] + hi[k]);
        u[k] = 0.5 + (projection.at(p, static_cast<std::size_t>(k)) - mid) / range;
      }
    }
    colors.push_back(color_at(u[0], u[1]));
  }
  return colors;
}

std::vector<Rgb> unit_colors(const SotmModel& model) {
  return unit_colors(model, project_units(model));
}

FeaturePlane feature_plane(const SotmModel& model, std::size_t k) {
  model.validate();
  if (k >= model.dim()) {
    throw RangeError("feature index " + std::to_string(k + 1) + " out of range (model has " +
                     std::to_string(model.dim()) + " features)");
  }
  FeaturePlane plane;
  plane.feature_index = k;
  plane.feature_name = model.feature_names[k];
  plane.slices = model.slice_count();
  plane.units = model.units();
  plane.values.reserve(plane.slices * plane.units);
  for (const auto& a : model.arrays) {
    for (std::size_t i = 0; i < a.units(); ++i) plane.values.push_back(a.at(i, k));
  }
  const auto [mn, mx] = std::minmax_element(plane.values.begin(), plane.values.end());
  plane.min = *mn;
  plane.max = *mx;
  return plane;
}

std::string render_map_svg(const SotmModel& model, const std::vector<Rgb>& colors, const SvgLayout& layout) {
  model.validate();
  const std::size_t T = model.slice_count();
  const std::size_t M = model.units();
  if (colors.size() != T * M) throw ContractError("colour count does not match the model's units");
  const Frame f = make_frame(T, M, layout);
  std::ostringstream svg;
  open_document(svg, f, layout.title);

  svg << "<g class=\"grid\">\n";
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < M; ++i) {
      cell(svg, f, t, i, colors[t * M + i], model.time_keys[t].label + ", unit " + std::to_string(i + 1));
    }
  }
  svg << "</g>\n";
  axis_labels(svg, f, model);

  // Legend: the colour plane over both projection axes.
  constexpr int kCols = 10;
  constexpr int kRows = 6;
  constexpr double kSwatch = 11.0;
  svg << "<g class=\"legend\">\n<text x=\"" << num(f.legend_x) << "\" y=\"" << num(f.top + 8.0)
      << "\">Sammon projection</text>\n";
  for (int r = 0; r < kRows; ++r) {
    for (int c = 0; c < kCols; ++c) {
      const Rgb col = color_at(c / double(kCols - 1), r / double(kRows - 1));
      svg << "<rect class=\"legend-swatch\" x=\"" << num(f.legend_x + kSwatch * c) << "\" y=\""
          << num(f.top + 16.0 + kSwatch * r) << "\" width=\"" << num(kSwatch) << "\" height=\"" << num(kSwatch)
          << "\" fill=\"" << col.hex() << "\"/>\n";
    }
  }
  svg << "<text x=\"" << num(f.legend_x) << "\" y=\"" << num(f.top + 16.0 + kSwatch * kRows + 12.0)
      << "\">axis 1: hue, axis 2: lightness</text>\n</g>\n</svg>\n";
  return svg.str();
}

std::string render_plane_svg(const SotmModel& model, const FeaturePlane& plane, const SvgLayout& layout) {
  model.validate();
  const std::size_t T = model.slice_count();
  const std::size_t M = model.units();
  if (plane.slices != T || plane.units != M) throw ContractError("feature plane does not match the model");
  const Frame f = make_frame(T, M, layout);
  std::ostringstream svg;
  SvgLayout titled = layout;
  if (titled.title.empty()) titled.title = plane.feature_name;
  open_document(svg, f, titled.title);

  const double span = plane.max - plane.min;
  svg << "<g class=\"grid\">\n";
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < M; ++i) {
      const double v = plane.at(t, i);
      const double level = span > 0.0 ? (v - plane.min) / span : 0.5;
      cell(svg, f, t, i, blue_ramp(level), model.time_keys[t].label + ", unit " + std::to_string(i + 1) + ": " + num(v));
    }
  }
  svg << "</g>\n";
  axis_labels(svg, f, model);

  constexpr int kSteps = 10;
  constexpr double kStep = 12.0;
  svg << "<g class=\"legend\">\n";
  svg << "<text x=\"" << num(f.legend_x + 20.0) << "\" y=\"" << num(f.top + 8.0) << "\">" << num(plane.max)
      << "</text>\n";
  for (int s = 0; s < kSteps; ++s) {
    const double level = 1.0 - s / double(kSteps - 1);
    svg << "<rect class=\"legend-swatch\" x=\"" << num(f.legend_x) << "\" y=\"" << num(f.top + kStep * s)
        << "\" width=\"14\" height=\"" << num(kStep) << "\" fill=\"" << blue_ramp(level).hex() << "\"/>\n";
  }
  svg << "<text x=\"" << num(f.legend_x + 20.0) << "\" y=\"" << num(f.top + kStep * kSteps) << "\">"
      << num(plane.min) << "</text>\n</g>\n</svg>\n";
  return svg.str();
}

void write_topology_csv(const SotmModel& model, const Projection& projection, std::ostream& out) {
  const std::size_t M = model.units();
  if (projection.count != model.slice_count() * M || projection.dims < 2) {
    throw ContractError("projection does not match the model's units");
  }
  out << "time_key,unit,x,y\n";
  for (std::size_t t = 0; t < model.slice_count(); ++t) {
    for (std::size_t i = 0; i < M; ++i) {
      out << model.time_keys[t].label << ',' << i + 1 << ',' << num(projection.at(t * M + i, 0)) << ','
          << num(projection.at(t * M + i, 1)) << '\n';
    }
  }
}

void write_plane_csv(const SotmModel& model, const FeaturePlane& plane, std::ostream& out) {
  out << "time_key,unit," << plane.feature_name << '\n';
  for (std::size_t t = 0; t < plane.slices; ++t) {
    for (std::size_t i = 0; i < plane.units; ++i) {
      out << model.time_keys[t].label << ',' << i + 1 << ',' << num(plane.at(t, i)) << '\n';
    }
  }
}

}  // namespace sotm
