#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlrl/dynamics.hpp"
#include "nlrl/integrator.hpp"
#include "nlrl/lattice.hpp"
#include "nlrl/model.hpp"

namespace nlrl {

struct MeanDisplacement {
  double value = 0.0;
  double residual_norm = 0.0;  // probability still on the lattice at T
  std::optional<std::string> warning;
};

/// <dm> = sum_m m * int_0^T 2 gamma_a |a_m|^2 dt, read off the integrated
/// decay accumulators. The norm left at T bounds the error of stopping at T.
inline MeanDisplacement mean_displacement(const Trajectory& traj) {
  MeanDisplacement out;
  out.value = decay_weighted_displacement(traj.final);
  out.residual_norm = traj.final.norm();
  if (traj.truncation_unsafe)
    out.warning = "amplitude reached the lattice edge (N = " + std::to_string(traj.config.N) +
                  "); result may be affected by truncation";
  return out;
}

struct DisplacementSeries {
  std::vector<double> times;
  std::vector<double> values;
  double final_value = 0.0;
  double residual_norm = 0.0;
};

/// Delta m(t) at every recorded sample.
inline DisplacementSeries displacement_of_time(const Trajectory& traj) {
  DisplacementSeries out;
  out.times.reserve(traj.samples.size());
  out.values.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    out.times.push_back(s.t);
    out.values.push_back(decay_weighted_displacement(s));
  }
  out.final_value = out.values.empty() ? 0.0 : out.values.back();
  out.residual_norm = traj.final.norm();
  return out;
}

struct ContrastSeries {
  std::vector<double> times;
  int first_cell = 0;
  int last_cell = -1;
  std::vector<std::vector<double>> Z;  // Z[sample][m - first_cell]

  double at(std::size_t sample, int m) const { return Z.at(sample).at(static_cast<std::size_t>(m - first_cell)); }
};

inline ContrastSeries contrast_series(const Trajectory& traj) {
  ContrastSeries out;
  out.first_cell = -traj.config.N;
  out.last_cell = traj.config.N;
  out.times.reserve(traj.samples.size());
  out.Z.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    out.times.push_back(s.t);
    auto& row = out.Z.emplace_back();
    row.reserve(s.cells());
    for (int m = s.first_cell(); m <= s.last_cell(); ++m) row.push_back(effective_contrast(traj.params, s, m));
  }
  return out;
}

/// |2 Re<psi|d psi/dt> + sum_m 2 gamma_a |a_m|^2|, which vanishes for every
/// model with symmetric couplings.
inline double norm_rate_residual(const ModelParams& p, const LatticeState& s) {
  const LatticeDerivative d = rhs(p, s);
  const auto a = s.a_data();
  const auto b = s.b_data();
  double rate = 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    rate += 2.0 * (std::conj(a[i]) * d.da[i] + std::conj(b[i]) * d.db[i]).real();
    loss += 2.0 * p.gamma_a * std::norm(a[i]);
  }
  return std::abs(rate + loss);
}

/// Mean displacement of the linear chain when hopping is incoherent:
/// nu^2 / (nu^2 + mu^2).
inline double incoherent_reference(double mu, double nu) {
  if (mu == 0.0 && nu == 0.0) throw DomainError("mu, nu", "both couplings are zero");
  return nu * nu / (nu * nu + mu * mu);
}

}  // namespace nlrl
