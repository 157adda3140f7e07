#pragma once

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "nlrl/io/csv.hpp"
#include "nlrl/sweeps.hpp"
#include "nlrl/version.hpp"

namespace nlrl::io {

using json = nlohmann::ordered_json;

namespace detail {

// NaN has no JSON spelling.
inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace detail

inline json to_json(const ModelParams& p) {
  return {{"model", std::string(to_string(p.kind))},
          {"delta_g", p.delta_g},
          {"mu", p.mu},
          {"nu", p.nu},
          {"gamma_a", p.gamma_a},
          {"U", p.U},
          {"negate_linear", p.negate_linear}};
}

inline json to_json(const SimConfig& c) {
  json initial;
  if (const auto* s = std::get_if<SingleSite>(&c.initial)) {
    initial = {{"m", s->m}, {"sublattice", s->sublattice == Sublattice::A ? "a" : "b"}};
  } else {
    initial = json::array();
    for (const auto& e : std::get<CustomState>(c.initial).sites)
      initial.push_back({{"m", e.m},
                         {"sublattice", e.sublattice == Sublattice::A ? "a" : "b"},
                         {"re", e.amplitude.real()},
                         {"im", e.amplitude.imag()}});
  }
  return {{"N", c.N},
          {"dt", c.dt},
          {"T", c.T},
          {"sample_stride", c.sample_stride},
          {"edge_tolerance", c.edge_tolerance},
          {"initial", initial}};
}

/// Sweep data only; provenance goes to the sidecar.
inline json to_json(const SweepResult& r) {
  json curves = json::array();
  json errors = json::array();
  for (const auto& c : r.curves) {
    json points = json::array();
    for (const auto& p : c.points) {
      points.push_back({{"delta_g", p.delta_g},
                        {"mean_displacement", detail::number_or_null(p.mean_displacement)},
                        {"residual_norm", detail::number_or_null(p.residual_norm)},
                        {"truncation_flag", p.truncation_flag}});
      if (p.error) errors.push_back({{"U", c.U}, {"delta_g", p.delta_g}, {"error", *p.error}});
    }
    curves.push_back({{"U", c.U}, {"points", std::move(points)}});
  }
  return {{"model", std::string(to_string(r.spec.model))},
          {"gamma_a", r.spec.gamma_a},
          {"negate_linear", r.spec.negate_linear},
          {"sim", to_json(r.spec.sim)},
          {"curves", std::move(curves)},
          {"errors", std::move(errors)}};
}

inline json to_json(const HeatmapRun& run) {
  json out = {{"params", to_json(run.params)},
              {"sim", to_json(run.config)},
              {"mean_displacement", run.mean.value},
              {"residual_norm", run.mean.residual_norm},
              {"truncation_flag", run.truncation_unsafe}};
  if (run.mean.warning) out["warning"] = *run.mean.warning;
  out["displacement"] = {{"t", run.displacement.times}, {"Delta_m_t", run.displacement.values}};
  return out;
}

struct RunMetadata {
  double dt = 0.0;
  double T = 0.0;
  int N = 0;
  double wall_seconds = 0.0;
  std::string timestamp;
};

inline json to_json(const RunMetadata& m) {
  return {{"dt", m.dt},
          {"T", m.T},
          {"N", m.N},
          {"engine_version", std::string(kEngineVersion)},
          {"wall_seconds", m.wall_seconds},
          {"timestamp", m.timestamp}};
}

inline void write_json(const json& doc, const std::string& path) {
  auto out = io::detail::open_for_write(path);
  out << doc.dump(2) << '\n';
  io::detail::finish(out, path);
}

}  // namespace nlrl::io
