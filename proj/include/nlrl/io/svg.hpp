#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nlrl/io/csv.hpp"
#include "nlrl/sweeps.hpp"

namespace nlrl::io {

namespace svg {

/// Coordinates and labels are written with 6 significant digits so that
/// output is stable across platforms.
inline std::string num(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

struct Rgb {
  double r, g, b;
};

inline std::string hex(Rgb c) {
  auto ch = [](double v) { return static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", ch(c.r), ch(c.g), ch(c.b));
  return buf;
}

inline Rgb lerp(Rgb a, Rgb b, double f) { return {a.r + (b.r - a.r) * f, a.g + (b.g - a.g) * f, a.b + (b.b - a.b) * f}; }

template <std::size_t K>
Rgb ramp(const std::array<Rgb, K>& stops, double f) {
  f = std::clamp(std::isfinite(f) ? f : 0.0, 0.0, 1.0) * static_cast<double>(K - 1);
  const auto i = std::min(static_cast<std::size_t>(f), K - 2);
  return lerp(stops[i], stops[i + 1], f - static_cast<double>(i));
}

// Viridis-like, f in [0, 1].
inline Rgb sequential(double f) {
  static constexpr std::array<Rgb, 5> kStops{{{0.267, 0.005, 0.329},
                                              {0.231, 0.322, 0.545},
                                              {0.129, 0.569, 0.549},
                                              {0.369, 0.788, 0.384},
                                              {0.993, 0.906, 0.144}}};
  return ramp(kStops, f);
}

// Blue-white-red, f in [0, 1] with 0.5 neutral.
inline Rgb diverging(double f) {
  static constexpr std::array<Rgb, 3> kStops{{{0.129, 0.400, 0.675}, {0.969, 0.969, 0.969}, {0.698, 0.094, 0.169}}};
  return ramp(kStops, f);
}

inline const std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                 "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

/// Maps data coordinates into a plotting rectangle (y grows upwards).
struct Frame {
  double left = 70, top = 30, width = 520, height = 330;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;

  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

inline std::vector<double> ticks(double lo, double hi, int target = 5) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return out;
}

inline void header(std::ostringstream& out, double w, double h) {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
      << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline void axes(std::ostringstream& out, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  out << "<g stroke=\"black\" fill=\"none\">\n"
      << "<rect x=\"" << num(f.left) << "\" y=\"" << num(f.top) << "\" width=\"" << num(f.width) << "\" height=\""
      << num(f.height) << "\"/>\n";
  for (double t : ticks(f.x0, f.x1))
    out << "<line x1=\"" << num(f.px(t)) << "\" y1=\"" << num(f.top + f.height) << "\" x2=\"" << num(f.px(t))
        << "\" y2=\"" << num(f.top + f.height + 5) << "\"/>\n";
  for (double t : ticks(f.y0, f.y1))
    out << "<line x1=\"" << num(f.left - 5) << "\" y1=\"" << num(f.py(t)) << "\" x2=\"" << num(f.left)
        << "\" y2=\"" << num(f.py(t)) << "\"/>\n";
  out << "</g>\n<g fill=\"black\">\n";
  for (double t : ticks(f.x0, f.x1))
    out << "<text x=\"" << num(f.px(t)) << "\" y=\"" << num(f.top + f.height + 18) << "\" text-anchor=\"middle\">"
        << num(t) << "</text>\n";
  for (double t : ticks(f.y0, f.y1))
    out << "<text x=\"" << num(f.left - 8) << "\" y=\"" << num(f.py(t) + 4) << "\" text-anchor=\"end\">" << num(t)
        << "</text>\n";
  out << "<text class=\"xlabel\" x=\"" << num(f.left + f.width / 2) << "\" y=\"" << num(f.top + f.height + 38)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << xlabel << "</text>\n"
      << "<text class=\"ylabel\" x=\"" << num(f.left - 45) << "\" y=\"" << num(f.top + f.height / 2)
      << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 " << num(f.left - 45) << ' '
      << num(f.top + f.height / 2) << ")\">" << ylabel << "</text>\n</g>\n";
}

}  // namespace svg

/// <dm> versus delta_g, one polyline per U value. Failed points split the
/// line; a curve with a single usable point is drawn as a marker.
inline std::string sweep_svg(const SweepResult& result) {
  svg::Frame f;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = 0.0, ymax = 1.0;
  for (const auto& c : result.curves)
    for (const auto& p : c.points) {
      xmin = std::min(xmin, p.delta_g);
      xmax = std::max(xmax, p.delta_g);
      if (p.ok() && std::isfinite(p.mean_displacement)) {
        ymin = std::min(ymin, p.mean_displacement);
        ymax = std::max(ymax, p.mean_displacement);
      }
    }
  if (!std::isfinite(xmin)) xmin = -0.5, xmax = 0.5;
  if (xmax - xmin < 1e-12) xmin -= 0.05, xmax += 0.05;
  const double pad = 0.05 * (ymax - ymin);
  f.x0 = xmin;
  f.x1 = xmax;
  f.y0 = ymin - pad;
  f.y1 = ymax + pad;

  std::ostringstream out;
  svg::header(out, 720, 420);
  svg::axes(out, f, "δg", "⟨Δm⟩");

  for (std::size_t ci = 0; ci < result.curves.size(); ++ci) {
    const auto& curve = result.curves[ci];
    const char* color = svg::kPalette[ci % svg::kPalette.size()];
    std::vector<std::vector<std::pair<double, double>>> runs(1);
    for (const auto& p : curve.points) {
      if (p.ok() && std::isfinite(p.mean_displacement))
        runs.back().emplace_back(f.px(p.delta_g), f.py(p.mean_displacement));
      else if (!runs.back().empty())
        runs.emplace_back();
    }
    for (const auto& run : runs) {
      if (run.size() == 1) {
        out << "<circle cx=\"" << svg::num(run[0].first) << "\" cy=\"" << svg::num(run[0].second)
            << "\" r=\"4\" fill=\"" << color << "\"/>\n";
      } else if (run.size() > 1) {
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < run.size(); ++i)
          out << (i ? " " : "") << svg::num(run[i].first) << ',' << svg::num(run[i].second);
        out << "\"/>\n";
      }
    }
    const double ly = f.top + 10 + 18 * static_cast<double>(ci);
    const double lx = f.left + f.width + 15;
    out << "<line x1=\"" << svg::num(lx) << "\" y1=\"" << svg::num(ly) << "\" x2=\"" << svg::num(lx + 20)
        << "\" y2=\"" << svg::num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << svg::num(lx + 25) << "\" y=\"" << svg::num(ly + 4) << "\">U = " << svg::num(curve.U)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

inline void write_sweep_svg(const SweepResult& result, const std::string& path) {
  write_text(sweep_svg(result), path);
}

/// Values over (sample, cell) for a colour-mapped plot with t across and m up.
struct HeatmapData {
  std::vector<double> times;
  int first_cell = 0;
  std::vector<std::vector<double>> values;  // [sample][m - first_cell]
  bool diverging = false;                   // centre the colour scale at zero
  std::string title;
};

inline HeatmapData occupancy_heatmap(const OccupancyGrid& grid) {
  HeatmapData h{grid.times, grid.first_cell, {}, false, "|a_m|² + |b_m|²"};
  for (std::size_t s = 0; s < grid.times.size(); ++s) {
    auto& row = h.values.emplace_back();
    for (int m = grid.first_cell; m <= grid.last_cell; ++m) row.push_back(grid.occupancy(s, m));
  }
  return h;
}

inline HeatmapData contrast_heatmap(const ContrastSeries& series) {
  return {series.times, series.first_cell, series.Z, true, "Z_m"};
}

/// Draws at most `max_columns` time columns, and only the band of cells whose
/// values ever differ from the value at the lattice edge.
inline std::string heatmap_svg(const HeatmapData& data, std::size_t max_columns = 240) {
  std::ostringstream out;
  svg::Frame f;
  f.width = 560;
  f.height = 340;
  svg::header(out, 760, 420);

  const std::size_t samples = data.values.size();
  const std::size_t cells = samples ? data.values[0].size() : 0;

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& row : data.values)
    for (double v : row) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;

  // Cell band: rows where anything happens relative to the edge cell.
  std::size_t c0 = 0, c1 = cells ? cells - 1 : 0;
  if (cells > 0) {
    const double tol = 1e-4 * std::max(hi - lo, 1e-300);
    auto active = [&](std::size_t c) {
      for (const auto& row : data.values)
        if (std::abs(row[c] - row[0]) > tol) return true;
      return false;
    };
    while (c0 < c1 && !active(c0)) ++c0;
    while (c1 > c0 && !active(c1)) --c1;
    c0 = c0 > 0 ? c0 - 1 : 0;
    c1 = std::min(cells - 1, c1 + 1);
  }
  const int m_lo = data.first_cell + static_cast<int>(c0);
  const int m_hi = data.first_cell + static_cast<int>(c1);

  const double tmin = data.times.empty() ? 0.0 : data.times.front();
  double tmax = data.times.empty() ? 1.0 : data.times.back();
  if (tmax <= tmin) tmax = tmin + 1.0;
  f.x0 = tmin;
  f.x1 = tmax;
  f.y0 = m_lo - 0.5;
  f.y1 = m_hi + 0.5;

  double scale_lo = lo, scale_hi = hi;
  if (data.diverging) {
    const double a = std::max({std::abs(lo), std::abs(hi), 1e-300});
    scale_lo = -a;
    scale_hi = a;
  }
  auto colour = [&](double v) {
    const double frac = scale_hi > scale_lo ? (v - scale_lo) / (scale_hi - scale_lo) : 0.0;
    return svg::hex(data.diverging ? svg::diverging(frac) : svg::sequential(frac));
  };

  const std::size_t columns = std::min(max_columns, std::max<std::size_t>(samples, 1));
  out << "<g shape-rendering=\"crispEdges\">\n";
  for (std::size_t col = 0; col < columns && samples > 0; ++col) {
    const std::size_t s = samples == 1 ? 0 : col * (samples - 1) / std::max<std::size_t>(columns - 1, 1);
    const double ta = tmin + (tmax - tmin) * static_cast<double>(col) / static_cast<double>(columns);
    const double tb = tmin + (tmax - tmin) * static_cast<double>(col + 1) / static_cast<double>(columns);
    const double x = f.px(ta), w = f.px(tb) - x;
    for (std::size_t c = c0; c <= c1 && c < cells; ++c) {
      const int m = data.first_cell + static_cast<int>(c);
      const double y = f.py(m + 0.5), h = f.py(m - 0.5) - y;
      out << "<rect x=\"" << svg::num(x) << "\" y=\"" << svg::num(y) << "\" width=\"" << svg::num(w)
          << "\" height=\"" << svg::num(h) << "\" fill=\"" << colour(data.values[s][c]) << "\"/>\n";
    }
  }
  out << "</g>\n";
  svg::axes(out, f, "t", "m");

  // Colour bar.
  const double bx = f.left + f.width + 20, by = f.top, bh = f.height;
  constexpr int kSteps = 32;
  for (int i = 0; i < kSteps; ++i) {
    const double v = scale_lo + (scale_hi - scale_lo) * (i + 0.5) / kSteps;
    out << "<rect x=\"" << svg::num(bx) << "\" y=\"" << svg::num(by + bh * (kSteps - 1 - i) / kSteps)
        << "\" width=\"16\" height=\"" << svg::num(bh / kSteps + 0.5) << "\" fill=\"" << colour(v) << "\"/>\n";
  }
  out << "<text x=\"" << svg::num(bx + 22) << "\" y=\"" << svg::num(by + 10) << "\">" << svg::num(scale_hi)
      << "</text>\n<text x=\"" << svg::num(bx + 22) << "\" y=\"" << svg::num(by + bh) << "\">" << svg::num(scale_lo)
      << "</text>\n<text x=\"" << svg::num(f.left + f.width / 2) << "\" y=\"18\" text-anchor=\"middle\">"
      << data.title << "</text>\n</svg>\n";
  return out.str();
}

inline void write_heatmap_svg(const HeatmapData& data, const std::string& path) {
  write_text(heatmap_svg(data), path);
}

}  // namespace nlrl::io
