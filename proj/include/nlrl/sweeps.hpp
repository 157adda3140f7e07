#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <ctime>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nlrl/integrator.hpp"
#include "nlrl/model.hpp"
#include "nlrl/observables.hpp"
#include "nlrl/version.hpp"

namespace nlrl {

/// 81 points, step 0.0125, endpoints +-0.5 included.
inline std::vector<double> default_delta_g_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 80; ++i) grid.push_back(static_cast<double>(i - 40) / 80.0);
  return grid;
}

inline std::vector<double> default_u_values() { return {0.0, 0.5, 3.0, 5.0}; }

/// start, start+step, ... up to stop inclusive (within 1e-9 of a step).
inline std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0) || !std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
    throw std::invalid_argument("grid needs finite bounds and a positive step");
  if (stop < start) throw std::invalid_argument("grid stop must not be below start");
  const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    double x = start + static_cast<double>(i) * step;
    // Snap values that should be exact decimals (e.g. 0.3, not 0.30000000000000004).
    const double snapped = std::round(x * 1e9) / 1e9;
    if (std::abs(snapped - x) < 1e-12) x = snapped;
    grid.push_back(x);
  }
  return grid;
}

struct SweepSpec {
  ModelKind model = ModelKind::Linear;
  std::vector<double> delta_g_grid = default_delta_g_grid();
  std::vector<double> U_values = default_u_values();
  double gamma_a = 2.0;
  SimConfig sim;
  bool negate_linear = false;
  unsigned workers = 0;  // 0: one per hardware thread
};

struct SweepPoint {
  double delta_g = 0.0;
  double mean_displacement = 0.0;
  double residual_norm = 0.0;
  bool truncation_flag = false;
  std::optional<std::string> error;  // set when the point failed; numbers are NaN then

  bool ok() const noexcept { return !error.has_value(); }
};

struct SweepCurve {
  double U = 0.0;
  std::vector<SweepPoint> points;
};

struct SweepMetadata {
  double dt = 0.0;
  double T = 0.0;
  int N = 0;
  std::string timestamp;
  std::string engine_version;
  double wall_seconds = 0.0;
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCurve> curves;  // one per U value, in input order
  SweepMetadata metadata;

  std::size_t failed_points() const {
    std::size_t n = 0;
    for (const auto& c : curves)
      n += static_cast<std::size_t>(std::count_if(c.points.begin(), c.points.end(), [](const auto& p) { return !p.ok(); }));
    return n;
  }
};

inline void validate(const SweepSpec& spec) {
  if (spec.delta_g_grid.empty()) throw std::invalid_argument("delta_g grid is empty");
  if (spec.U_values.empty()) throw std::invalid_argument("U list is empty");
  if (!std::is_sorted(spec.delta_g_grid.begin(), spec.delta_g_grid.end(), std::less_equal<>{}))
    throw std::invalid_argument("delta_g grid must be strictly increasing");
  for (double dg : spec.delta_g_grid)
    for (double U : spec.U_values) validate(make_params(spec.model, dg, spec.gamma_a, U, spec.negate_linear), spec.sim);
}

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Runs job(i) for i in [0, count) on up to `workers` threads.
template <class Job>
void parallel_for(std::size_t count, unsigned workers, Job&& job) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
}

}  // namespace detail

/// Evolves every (U, delta_g) point independently from a fresh initial state.
/// A point that fails is recorded with its error; the rest of the sweep goes on.
inline SweepResult run_sweep(const SweepSpec& spec) {
  validate(spec);
  const auto start = std::chrono::steady_clock::now();

  SweepResult result;
  result.spec = spec;
  const std::size_t per_curve = spec.delta_g_grid.size();
  for (double U : spec.U_values) result.curves.push_back({U, std::vector<SweepPoint>(per_curve)});

  SimConfig sim = spec.sim;
  sim.sample_stride = std::numeric_limits<int>::max();  // only t = 0 and t = T are needed

  detail::parallel_for(spec.U_values.size() * per_curve, spec.workers, [&](std::size_t task) {
    const std::size_t c = task / per_curve;
    const std::size_t g = task % per_curve;
    SweepPoint& point = result.curves[c].points[g];
    point.delta_g = spec.delta_g_grid[g];
    try {
      const auto params = make_params(spec.model, point.delta_g, spec.gamma_a, spec.U_values[c], spec.negate_linear);
      const Trajectory traj = evolve(params, sim);
      const auto md = mean_displacement(traj);
      point.mean_displacement = md.value;
      point.residual_norm = md.residual_norm;
      point.truncation_flag = traj.truncation_unsafe;
    } catch (const std::exception& e) {
      point.mean_displacement = std::numeric_limits<double>::quiet_NaN();
      point.residual_norm = std::numeric_limits<double>::quiet_NaN();
      point.error = e.what();
    }
  });

  result.metadata.dt = spec.sim.dt;
  result.metadata.T = spec.sim.T;
  result.metadata.N = spec.sim.N;
  result.metadata.timestamp = detail::utc_timestamp();
  result.metadata.engine_version = std::string(kEngineVersion);
  result.metadata.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

/// |a_m|^2 and |b_m|^2 over (sample, cell).
struct OccupancyGrid {
  std::vector<double> times;
  int first_cell = 0;
  int last_cell = -1;
  std::vector<std::vector<double>> abs_a_sq;  // [sample][m - first_cell]
  std::vector<std::vector<double>> abs_b_sq;
  std::vector<double> norm;  // per sample

  double occupancy(std::size_t sample, int m) const {
    const auto i = static_cast<std::size_t>(m - first_cell);
    return abs_a_sq.at(sample).at(i) + abs_b_sq.at(sample).at(i);
  }
};

inline OccupancyGrid occupancy_grid(const Trajectory& traj) {
  OccupancyGrid out;
  out.first_cell = -traj.config.N;
  out.last_cell = traj.config.N;
  for (const auto& s : traj.samples) {
    out.times.push_back(s.t);
    auto& ra = out.abs_a_sq.emplace_back();
    auto& rb = out.abs_b_sq.emplace_back();
    for (const complex& x : s.a_data()) ra.push_back(std::norm(x));
    for (const complex& x : s.b_data()) rb.push_back(std::norm(x));
    out.norm.push_back(s.norm());
  }
  return out;
}

/// Time-aligned datasets behind one run: occupancy, contrast and displacement.
struct HeatmapRun {
  ModelParams params;
  SimConfig config;
  OccupancyGrid occupancy;
  ContrastSeries contrast;
  DisplacementSeries displacement;
  MeanDisplacement mean;
  bool truncation_unsafe = false;
};

inline HeatmapRun heatmap_run(const ModelParams& params, const SimConfig& config) {
  const Trajectory traj = evolve(params, config);
  return {params,
          config,
          occupancy_grid(traj),
          contrast_series(traj),
          displacement_of_time(traj),
          mean_displacement(traj),
          traj.truncation_unsafe};
}

}  // namespace nlrl
