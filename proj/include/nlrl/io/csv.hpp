#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "nlrl/observables.hpp"
#include "nlrl/sweeps.hpp"

namespace nlrl::io {

class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return x;
}

namespace detail {

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  return out;
}

inline void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError(path, "write failed");
}

inline std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

}  // namespace detail

inline void write_text(std::string_view text, const std::string& path) {
  auto out = detail::open_for_write(path);
  out << text;
  detail::finish(out, path);
}

inline constexpr std::string_view kSweepHeader =
    "model,delta_g,U,gamma_a,mean_displacement,residual_norm,truncation_flag";
inline constexpr std::string_view kTrajectoryHeader = "t,m,abs_a_sq,abs_b_sq,Z_m,Delta_m_t,norm";

/// One row per (U, delta_g), curves in input order. Failed points keep their
/// row with empty numeric fields.
inline void write_sweep_csv(const SweepResult& result, const std::string& path) {
  auto out = detail::open_for_write(path);
  out << kSweepHeader << '\n';
  const std::string model(to_string(result.spec.model));
  const std::string gamma = format_double(result.spec.gamma_a);
  for (const auto& curve : result.curves) {
    const std::string U = format_double(curve.U);
    for (const auto& p : curve.points) {
      out << model << ',' << format_double(p.delta_g) << ',' << U << ',' << gamma << ',';
      if (p.ok())
        out << format_double(p.mean_displacement) << ',' << format_double(p.residual_norm) << ','
            << (p.truncation_flag ? "true" : "false");
      else
        out << ",,";
      out << '\n';
    }
  }
  detail::finish(out, path);
}

struct SweepCsvRow {
  std::string model;
  double delta_g = 0.0;
  double U = 0.0;
  double gamma_a = 0.0;
  std::optional<double> mean_displacement;
  std::optional<double> residual_norm;
  std::optional<bool> truncation_flag;
};

inline std::vector<SweepCsvRow> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open for reading");
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) throw IoError(path, "missing sweep CSV header");
  std::vector<SweepCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split(line);
    if (f.size() != 7) throw IoError(path, "malformed row: " + line);
    SweepCsvRow row;
    row.model = f[0];
    row.delta_g = parse_double(f[1]);
    row.U = parse_double(f[2]);
    row.gamma_a = parse_double(f[3]);
    if (!f[4].empty()) row.mean_displacement = parse_double(f[4]);
    if (!f[5].empty()) row.residual_norm = parse_double(f[5]);
    if (!f[6].empty()) row.truncation_flag = (f[6] == "true");
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Long format, one row per (sample, cell).
inline void write_trajectory_csv(const HeatmapRun& run, const std::string& path) {
  auto out = detail::open_for_write(path);
  out << kTrajectoryHeader << '\n';
  const auto& occ = run.occupancy;
  for (std::size_t s = 0; s < occ.times.size(); ++s) {
    const std::string t = format_double(occ.times[s]);
    const std::string dm = format_double(run.displacement.values[s]);
    const std::string norm = format_double(occ.norm[s]);
    for (int m = occ.first_cell; m <= occ.last_cell; ++m) {
      const auto i = static_cast<std::size_t>(m - occ.first_cell);
      out << t << ',' << m << ',' << format_double(occ.abs_a_sq[s][i]) << ',' << format_double(occ.abs_b_sq[s][i])
          << ',' << format_double(run.contrast.Z[s][i]) << ',' << dm << ',' << norm << '\n';
    }
  }
  detail::finish(out, path);
}

inline void write_displacement_csv(const DisplacementSeries& series, const std::string& path) {
  auto out = detail::open_for_write(path);
  out << "t,Delta_m_t\n";
  for (std::size_t i = 0; i < series.times.size(); ++i)
    out << format_double(series.times[i]) << ',' << format_double(series.values[i]) << '\n';
  detail::finish(out, path);
}

inline void write_contrast_csv(const ContrastSeries& series, const std::string& path) {
  auto out = detail::open_for_write(path);
  out << "t,m,Z_m\n";
  for (std::size_t s = 0; s < series.times.size(); ++s) {
    const std::string t = format_double(series.times[s]);
    for (int m = series.first_cell; m <= series.last_cell; ++m)
      out << t << ',' << m << ',' << format_double(series.at(s, m)) << '\n';
  }
  detail::finish(out, path);
}

inline void write_occupancy_csv(const OccupancyGrid& grid, const std::string& path) {
  auto out = detail::open_for_write(path);
  out << "t,m,occupancy\n";
  for (std::size_t s = 0; s < grid.times.size(); ++s) {
    const std::string t = format_double(grid.times[s]);
    for (int m = grid.first_cell; m <= grid.last_cell; ++m)
      out << t << ',' << m << ',' << format_double(grid.occupancy(s, m)) << '\n';
  }
  detail::finish(out, path);
}

}  // namespace nlrl::io
