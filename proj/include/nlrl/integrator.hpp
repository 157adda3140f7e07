#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlrl/dynamics.hpp"
#include "nlrl/lattice.hpp"
#include "nlrl/model.hpp"

namespace nlrl {

struct SimConfig {
  int N = 60;
  double dt = 1e-3;
  double T = 25.0;
  int sample_stride = 100;
  InitialStateSpec initial = SingleSite{0, Sublattice::B};
  double edge_tolerance = 1e-8;
};

/// Any amplitude above this magnitude aborts the run; the norm can only shrink.
inline constexpr double kBlowUpAmplitude = 1e6;

class IntegrationDiverged : public std::runtime_error {
 public:
  IntegrationDiverged(long step, double max_amplitude)
      : std::runtime_error("integration diverged at step " + std::to_string(step) +
                           " (max |amplitude| = " + std::to_string(max_amplitude) + ")"),
        step_(step),
        max_amplitude_(max_amplitude) {}
  long step() const noexcept { return step_; }
  double max_amplitude() const noexcept { return max_amplitude_; }

 private:
  long step_;
  double max_amplitude_;
};

struct Trajectory {
  SimConfig config;
  ModelParams params;
  std::vector<LatticeState> samples;  // first at t = 0, last at t = T
  LatticeState final;
  long steps = 0;
  double step_size = 0.0;  // T / steps, never above config.dt
  bool truncation_unsafe = false;
};

/// Largest admissible dt for the given couplings: 0.1 / max(|mu|, |nu|, gamma_a, U).
inline double max_stable_dt(const ModelParams& p) {
  const double rate = std::max({std::abs(p.mu), std::abs(p.nu), p.gamma_a, p.U});
  return rate > 0.0 ? 0.1 / rate : std::numeric_limits<double>::infinity();
}

/// Number of fixed steps covering [0, T]; T/dt is rounded up.
inline long step_count(double T, double dt) {
  const double ratio = T / dt;
  auto steps = static_cast<long>(std::ceil(ratio));
  // Absorb representation error so that T = k*dt does not become k+1 steps.
  if (steps > 1 && static_cast<double>(steps - 1) >= ratio * (1.0 - 1e-12)) --steps;
  return std::max(steps, 1L);
}

inline void validate(const ModelParams& p, const SimConfig& c) {
  if (c.N < 1) throw std::invalid_argument("N must be positive");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw std::invalid_argument("dt must be positive");
  if (!(c.T > 0.0) || !std::isfinite(c.T)) throw std::invalid_argument("T must be positive");
  if (c.sample_stride < 1) throw std::invalid_argument("sample_stride must be positive");
  if (!(c.edge_tolerance >= 0.0)) throw std::invalid_argument("edge_tolerance must be non-negative");
  if (c.dt > max_stable_dt(p))
    throw std::invalid_argument("dt = " + std::to_string(c.dt) + " exceeds stability bound " +
                                std::to_string(max_stable_dt(p)));
}

/// One classical RK4 step on the augmented state (amplitudes + decay
/// accumulators). Nonlinear shifts are re-evaluated at every stage.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(const LatticeState& shape)
      : stage_(shape), k1_(shape.cells()), k2_(shape.cells()), k3_(shape.cells()), k4_(shape.cells()) {}

  void step(const ModelParams& p, LatticeState& y, double h) {
    rhs(p, y, k1_);
    advance(y, 0.5 * h, k1_, stage_);
    rhs(p, stage_, k2_);
    advance(y, 0.5 * h, k2_, stage_);
    rhs(p, stage_, k3_);
    advance(y, h, k3_, stage_);
    rhs(p, stage_, k4_);

    const double w = h / 6.0;
    auto a = y.a_data();
    auto b = y.b_data();
    auto d = y.decay_data();
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] += w * (k1_.da[i] + 2.0 * (k2_.da[i] + k3_.da[i]) + k4_.da[i]);
      b[i] += w * (k1_.db[i] + 2.0 * (k2_.db[i] + k3_.db[i]) + k4_.db[i]);
      d[i] += w * (k1_.ddecay[i] + 2.0 * (k2_.ddecay[i] + k3_.ddecay[i]) + k4_.ddecay[i]);
    }
    y.t += h;
  }

 private:
  static void advance(const LatticeState& y, double h, const LatticeDerivative& k, LatticeState& out) {
    const auto a = y.a_data();
    const auto b = y.b_data();
    const auto d = y.decay_data();
    auto oa = out.a_data();
    auto ob = out.b_data();
    auto od = out.decay_data();
    for (std::size_t i = 0; i < a.size(); ++i) {
      oa[i] = a[i] + h * k.da[i];
      ob[i] = b[i] + h * k.db[i];
      od[i] = d[i] + h * k.ddecay[i];
    }
    out.t = y.t + h;
  }

  LatticeState stage_;
  LatticeDerivative k1_, k2_, k3_, k4_;
};

namespace detail {

inline double max_amplitude(const LatticeState& s) {
  double worst = 0.0;
  const auto a = s.a_data();
  const auto b = s.b_data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = std::max(std::norm(a[i]), std::norm(b[i]));
    if (!(x <= worst)) worst = x;  // NaN propagates
  }
  return std::sqrt(worst);
}

inline bool edge_leaks(const LatticeState& s, double tolerance) {
  return s.occupancy(s.first_cell()) > tolerance || s.occupancy(s.last_cell()) > tolerance;
}

}  // namespace detail

/// Integrates from the configured initial state to t = T with fixed-step RK4.
/// Samples are kept at t = 0, every `sample_stride` steps, and at t = T. The run is
/// flagged `truncation_unsafe` once an edge cell holds more than `edge_tolerance`.
inline Trajectory evolve(const ModelParams& params, const SimConfig& config) {
  validate(params, config);

  Trajectory traj;
  traj.config = config;
  traj.params = params;
  traj.steps = step_count(config.T, config.dt);
  traj.step_size = config.T / static_cast<double>(traj.steps);

  LatticeState y = make_initial_state(config.N, config.initial);
  Rk4Stepper stepper(y);

  traj.samples.reserve(static_cast<std::size_t>(traj.steps / config.sample_stride) + 2);
  traj.samples.push_back(y);
  traj.truncation_unsafe = detail::edge_leaks(y, config.edge_tolerance);

  for (long k = 1; k <= traj.steps; ++k) {
    stepper.step(params, y, traj.step_size);
    y.t = static_cast<double>(k) * traj.step_size;
    const double amp = detail::max_amplitude(y);
    if (!std::isfinite(amp) || amp > kBlowUpAmplitude) throw IntegrationDiverged(k, amp);
    // Edge leakage is checked every step, not only at stored samples.
    if (!traj.truncation_unsafe && detail::edge_leaks(y, config.edge_tolerance)) traj.truncation_unsafe = true;
    if (k % config.sample_stride == 0 || k == traj.steps) traj.samples.push_back(y);
  }
  traj.samples.back().t = config.T;
  y.t = config.T;
  traj.final = std::move(y);
  return traj;
}

/// sum_m m * decay_m: displacement weighted by where the probability left the lattice.
inline double decay_weighted_displacement(const LatticeState& s) {
  double total = 0.0;
  const auto d = s.decay_data();
  for (std::size_t i = 0; i < d.size(); ++i) total += static_cast<double>(static_cast<int>(i) - s.half_width()) * d[i];
  return total;
}

struct ConvergencePoint {
  double dt = 0.0;
  double mean_displacement = 0.0;
};

/// Re-runs `evolve` at dt, dt/2, ..., dt/2^refinements.
inline std::vector<ConvergencePoint> convergence_probe(const ModelParams& params, SimConfig config,
                                                       int refinements) {
  if (refinements < 2) throw std::invalid_argument("convergence_probe needs at least 2 refinements");
  config.sample_stride = std::numeric_limits<int>::max();
  std::vector<ConvergencePoint> out;
  for (int r = 0; r <= refinements; ++r) {
    const Trajectory traj = evolve(params, config);
    out.push_back({config.dt, decay_weighted_displacement(traj.final)});
    config.dt *= 0.5;
  }
  return out;
}

}  // namespace nlrl
