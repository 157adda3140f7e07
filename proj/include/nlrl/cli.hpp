#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nlrl/io/csv.hpp"
#include "nlrl/io/json.hpp"
#include "nlrl/io/svg.hpp"
#include "nlrl/nlrl.hpp"
#include "nlrl/random_state.hpp"

namespace nlrl::cli {

enum class Subcommand { Evolve, Sweep, Contrast, CheckNorm, Winding };
enum class OutputFormat { Csv, Json, Svg };

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDiverged = 2;
inline constexpr int kExitIo = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// --help / --version: the text to print, exit 0.
class InfoRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fully resolved command line.
struct RunManifest {
  Subcommand subcommand = Subcommand::Evolve;
  ModelParams params;           // evolve, contrast
  SweepSpec sweep;              // sweep, winding (grid), check-norm (models via all_models/params.kind, U list)
  SimConfig sim;
  std::string out_prefix = "nlrl";
  std::set<OutputFormat> formats;
  bool all_models = false;      // check-norm
  int norm_samples = 100;       // check-norm
  std::uint64_t seed = 20240101;

  std::string path(std::string_view suffix) const { return out_prefix + std::string(suffix); }
  bool wants(OutputFormat f) const { return formats.contains(f); }
};

namespace detail {

struct Options {
  std::string model = "linear";
  std::optional<double> delta_g;
  std::optional<std::string> delta_g_grid;
  std::vector<double> U;
  double gamma_a = 2.0;
  double dt = 1e-3;
  double horizon_gamma_t = 50.0;
  std::optional<double> horizon_t;
  std::optional<int> n;
  bool negate_linear = false;
  std::string initial = "0:b";
  std::string out = "nlrl";
  std::vector<std::string> format{"csv", "json", "svg"};
  int sample_stride = 100;
  double edge_tolerance = 1e-8;
  unsigned workers = 0;
  int samples = 100;
  std::uint64_t seed = 20240101;
};

inline void add_physics(CLI::App* sub, Options& o, bool with_grid) {
  sub->add_option("--model", o.model, "linear|a|b|c|d|e")->capture_default_str();
  auto* dg = sub->add_option("--delta-g", o.delta_g, "coupling imbalance, mu = 0.5 - dg, nu = 0.5 + dg");
  if (with_grid) {
    auto* grid = sub->add_option("--delta-g-grid", o.delta_g_grid, "start:stop:step (default -0.5:0.5:0.0125)");
    dg->excludes(grid);
  }
  sub->add_flag("--negate-linear", o.negate_linear, "flip the sign of mu and nu");
}

inline void add_dynamics(CLI::App* sub, Options& o) {
  sub->add_option("--u", o.U, "nonlinear coefficient(s), comma separated")->delimiter(',');
  sub->add_option("--gamma-a", o.gamma_a, "loss rate of the A sites")->capture_default_str();
  sub->add_option("--dt", o.dt, "RK4 time step")->capture_default_str();
  auto* hg = sub->add_option("--horizon-gamma-t", o.horizon_gamma_t, "horizon as gamma_a * T")->capture_default_str();
  auto* ht = sub->add_option("--horizon-t", o.horizon_t, "horizon T in time units (needed when gamma_a = 0)");
  hg->excludes(ht);
  sub->add_option("--n", o.n, "lattice half-width N (default 60 if gamma_a >= 1, else 150)");
  sub->add_option("--initial", o.initial, "<m>:<a|b> initial site")->capture_default_str();
  sub->add_option("--sample-stride", o.sample_stride, "record every k-th step")->capture_default_str();
  sub->add_option("--edge-tolerance", o.edge_tolerance, "edge occupancy that flags truncation")->capture_default_str();
}

inline void add_output(CLI::App* sub, Options& o) {
  sub->add_option("--out", o.out, "output path prefix")->capture_default_str();
  sub->add_option("--format", o.format, "csv,json,svg")->delimiter(',')->capture_default_str();
}

inline InitialStateSpec parse_initial(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--initial expects <m>:<a|b>, got '" + text + "'");
  const std::string site = text.substr(colon + 1);
  int m = 0;
  try {
    std::size_t used = 0;
    m = std::stoi(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("--initial: bad cell index in '" + text + "'");
  }
  if (site == "a" || site == "A") return SingleSite{m, Sublattice::A};
  if (site == "b" || site == "B") return SingleSite{m, Sublattice::B};
  throw UsageError("--initial: sublattice must be a or b, got '" + site + "'");
}

inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::size_t start = 0;
  for (;;) {
    const auto colon = text.find(':', start);
    const std::string piece = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
    try {
      parts.push_back(io::parse_double(piece));
    } catch (const std::exception&) {
      throw UsageError("--delta-g-grid: bad number '" + piece + "' in '" + text + "'");
    }
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 3) throw UsageError("--delta-g-grid expects start:stop:step, got '" + text + "'");
  try {
    return make_grid(parts[0], parts[1], parts[2]);
  } catch (const std::exception& e) {
    throw UsageError(std::string("--delta-g-grid: ") + e.what());
  }
}

inline std::set<OutputFormat> parse_formats(const std::vector<std::string>& names) {
  std::set<OutputFormat> out;
  for (const auto& n : names) {
    if (n == "csv") out.insert(OutputFormat::Csv);
    else if (n == "json") out.insert(OutputFormat::Json);
    else if (n == "svg") out.insert(OutputFormat::Svg);
    else throw UsageError("--format: unknown format '" + n + "'");
  }
  if (out.empty()) throw UsageError("--format: at least one output format is required");
  return out;
}

inline ModelKind parse_model(const std::string& name) {
  if (auto kind = parse_model_kind(name)) return *kind;
  throw UsageError("--model: unknown model '" + name + "' (expected linear, a, b, c, d, e)");
}

inline SimConfig build_sim(const Options& o) {
  SimConfig sim;
  if (o.horizon_t) {
    sim.T = *o.horizon_t;
  } else {
    if (o.gamma_a <= 0.0)
      throw UsageError("--gamma-a 0 leaves --horizon-gamma-t undefined; pass --horizon-t instead");
    sim.T = o.horizon_gamma_t / o.gamma_a;
  }
  if (!(sim.T > 0.0)) throw UsageError("horizon must be positive");
  sim.N = o.n.value_or(o.gamma_a >= 1.0 ? 60 : 150);
  if (sim.N < 1) throw UsageError("--n must be positive, got " + std::to_string(sim.N));
  sim.dt = o.dt;
  sim.sample_stride = o.sample_stride;
  sim.edge_tolerance = o.edge_tolerance;
  sim.initial = parse_initial(o.initial);
  return sim;
}

inline std::vector<double> u_values(const Options& o, ModelKind kind, std::vector<double> fallback) {
  std::vector<double> U = o.U.empty() ? std::move(fallback) : o.U;
  if (kind == ModelKind::Linear) {
    if (o.U.empty()) return {0.0};
    for (double u : U)
      if (u != 0.0)
        throw UsageError("conflicting model/U settings: --model linear has no nonlinearity but --u " +
                         io::format_double(u) + " was given");
  }
  return U;
}

template <class F>
auto domain_checked(F&& f) {
  try {
    return f();
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

}  // namespace detail

inline std::string usage_summary() {
  return "usage: nlrl <subcommand> [options]\n"
         "subcommands: evolve, sweep, contrast, check-norm, winding\n"
         "run 'nlrl <subcommand> --help' for options";
}

/// Resolves argv (without the program name) into a RunManifest. Options may
/// also come from an INI file given by --config, with one [section] per
/// subcommand; command-line values take precedence.
inline RunManifest parse_cli(const std::vector<std::string>& args) {
  if (args.empty()) throw UsageError("no subcommand given\n" + usage_summary());

  CLI::App app{"Transport in nonlinear lossy dimer chains", "nlrl"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "INI file; [evolve], [sweep], ... sections hold subcommand options");
  app.set_version_flag("--version", std::string(kEngineVersion));

  detail::Options evolve_o, sweep_o, contrast_o, norm_o, winding_o;
  auto* evolve = app.add_subcommand("evolve", "integrate one trajectory");
  auto* sweep = app.add_subcommand("sweep", "mean displacement over a delta_g x U grid");
  auto* contrast = app.add_subcommand("contrast", "effective coupling contrast Z_m(t) for one run");
  auto* check_norm = app.add_subcommand("check-norm", "norm-evolution residual on random states");
  auto* winding = app.add_subcommand("winding", "winding number of the linear chain");

  for (auto [sub, o, grid] : {std::tuple{evolve, &evolve_o, false}, std::tuple{sweep, &sweep_o, true},
                              std::tuple{contrast, &contrast_o, false}}) {
    detail::add_physics(sub, *o, grid);
    detail::add_dynamics(sub, *o);
    detail::add_output(sub, *o);
  }
  sweep->add_option("--workers", sweep_o.workers, "threads (0: all hardware threads)")->capture_default_str();

  norm_o.model = "all";
  check_norm->add_option("--model", norm_o.model, "linear|a|b|c|d|e|all")->capture_default_str();
  check_norm->add_option("--u", norm_o.U, "nonlinear coefficient(s)")->delimiter(',');
  check_norm->add_option("--gamma-a", norm_o.gamma_a)->capture_default_str();
  check_norm->add_option("--delta-g", norm_o.delta_g);
  check_norm->add_flag("--negate-linear", norm_o.negate_linear);
  check_norm->add_option("--n", norm_o.n, "lattice half-width of the random states");
  check_norm->add_option("--samples", norm_o.samples, "random states per model and U")->capture_default_str();
  check_norm->add_option("--seed", norm_o.seed)->capture_default_str();
  detail::add_output(check_norm, norm_o);

  detail::add_physics(winding, winding_o, true);
  detail::add_output(winding, winding_o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    throw InfoRequested(target->help());
  } catch (const CLI::CallForVersion&) {
    throw InfoRequested(std::string(kEngineVersion));
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunManifest man;
  const CLI::App* chosen = app.get_subcommands().front();
  const detail::Options* o = nullptr;
  if (chosen == evolve) man.subcommand = Subcommand::Evolve, o = &evolve_o;
  if (chosen == sweep) man.subcommand = Subcommand::Sweep, o = &sweep_o;
  if (chosen == contrast) man.subcommand = Subcommand::Contrast, o = &contrast_o;
  if (chosen == check_norm) man.subcommand = Subcommand::CheckNorm, o = &norm_o;
  if (chosen == winding) man.subcommand = Subcommand::Winding, o = &winding_o;

  man.out_prefix = o->out;
  man.formats = detail::parse_formats(o->format);
  man.seed = o->seed;

  switch (man.subcommand) {
    case Subcommand::Evolve:
    case Subcommand::Contrast: {
      const ModelKind kind = detail::parse_model(o->model);
      const auto U = detail::u_values(*o, kind, {0.0});
      if (U.size() != 1)
        throw UsageError("conflicting model/U settings: " + chosen->get_name() + " takes a single --u value");
      man.sim = detail::build_sim(*o);
      man.params = detail::domain_checked(
          [&] { return make_params(kind, o->delta_g.value_or(0.0), o->gamma_a, U[0], o->negate_linear); });
      detail::domain_checked([&] {
        validate(man.params, man.sim);
        return 0;
      });
      break;
    }
    case Subcommand::Sweep: {
      SweepSpec& spec = man.sweep;
      spec.model = detail::parse_model(o->model);
      spec.U_values = detail::u_values(*o, spec.model, default_u_values());
      spec.gamma_a = o->gamma_a;
      spec.negate_linear = o->negate_linear;
      spec.workers = o->workers;
      if (o->delta_g) spec.delta_g_grid = {*o->delta_g};
      else if (o->delta_g_grid) spec.delta_g_grid = detail::parse_grid(*o->delta_g_grid);
      spec.sim = detail::build_sim(*o);
      man.sim = spec.sim;
      detail::domain_checked([&] {
        validate(spec);
        return 0;
      });
      break;
    }
    case Subcommand::CheckNorm: {
      man.all_models = (o->model == "all");
      const ModelKind kind = man.all_models ? ModelKind::A : detail::parse_model(o->model);
      man.sweep.U_values = man.all_models ? (o->U.empty() ? default_u_values() : o->U)
                                          : detail::u_values(*o, kind, default_u_values());
      if (o->samples < 1) throw UsageError("--samples must be positive");
      man.norm_samples = o->samples;
      man.sim.N = o->n.value_or(10);
      if (man.sim.N < 1) throw UsageError("--n must be positive");
      for (double u : man.sweep.U_values)
        detail::domain_checked([&] { return make_params(kind, o->delta_g.value_or(0.0), o->gamma_a, u, o->negate_linear); });
      man.params = make_params(kind, o->delta_g.value_or(0.0), o->gamma_a, 0.0, o->negate_linear);
      break;
    }
    case Subcommand::Winding: {
      const ModelKind kind = detail::parse_model(o->model);
      if (o->delta_g) man.sweep.delta_g_grid = {*o->delta_g};
      else if (o->delta_g_grid) man.sweep.delta_g_grid = detail::parse_grid(*o->delta_g_grid);
      for (double dg : man.sweep.delta_g_grid)
        detail::domain_checked([&] { return make_params(kind, dg, 0.0, 0.0, o->negate_linear); });
      man.sweep.negate_linear = o->negate_linear;
      man.params = make_params(kind, 0.0, 0.0, 0.0, o->negate_linear);
      break;
    }
  }
  return man;
}

namespace detail {

inline std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void ensure_output_dir(const RunManifest& man) {
  const auto parent = std::filesystem::path(man.out_prefix).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent))
    throw io::IoError(parent.string(), "output directory does not exist");
}

inline void write_meta(const RunManifest& man, const SimConfig& sim, double wall) {
  io::RunMetadata meta{sim.dt, sim.T, sim.N, wall, iso_timestamp()};
  io::json doc = io::to_json(meta);
  doc["subcommand"] = std::vector<std::string>{"evolve", "sweep", "contrast", "check-norm", "winding"}
      [static_cast<std::size_t>(man.subcommand)];
  io::write_json(doc, man.path(".meta.json"));
}

}  // namespace detail

/// Executes a manifest, writing <out>.csv / .json / .svg and <out>.meta.json.
/// Returns the process exit code; I/O and divergence errors propagate.
inline int run(const RunManifest& man, std::ostream& log = std::cout) {
  detail::ensure_output_dir(man);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  int code = kExitOk;

  switch (man.subcommand) {
    case Subcommand::Evolve:
    case Subcommand::Contrast: {
      const HeatmapRun hm = heatmap_run(man.params, man.sim);
      const bool is_contrast = man.subcommand == Subcommand::Contrast;
      if (man.wants(OutputFormat::Csv)) {
        if (is_contrast) io::write_contrast_csv(hm.contrast, man.path(".csv"));
        else io::write_trajectory_csv(hm, man.path(".csv"));
      }
      if (man.wants(OutputFormat::Json)) io::write_json(io::to_json(hm), man.path(".json"));
      if (man.wants(OutputFormat::Svg))
        io::write_heatmap_svg(is_contrast ? io::contrast_heatmap(hm.contrast) : io::occupancy_heatmap(hm.occupancy),
                              man.path(".svg"));
      log << "mean_displacement " << io::format_double(hm.mean.value) << " residual_norm "
          << io::format_double(hm.mean.residual_norm) << '\n';
      if (hm.mean.warning) log << "warning: " << *hm.mean.warning << '\n';
      detail::write_meta(man, man.sim, elapsed());
      break;
    }
    case Subcommand::Sweep: {
      const SweepResult result = run_sweep(man.sweep);
      if (man.wants(OutputFormat::Csv)) io::write_sweep_csv(result, man.path(".csv"));
      if (man.wants(OutputFormat::Json)) io::write_json(io::to_json(result), man.path(".json"));
      if (man.wants(OutputFormat::Svg)) io::write_sweep_svg(result, man.path(".svg"));
      for (const auto& c : result.curves)
        for (const auto& p : c.points)
          if (p.error) {
            log << "point U=" << io::format_double(c.U) << " delta_g=" << io::format_double(p.delta_g)
                << " failed: " << *p.error << '\n';
            code = kExitDiverged;
          }
      log << result.curves.size() << " curve(s) x " << man.sweep.delta_g_grid.size() << " point(s) written to "
          << man.out_prefix << '\n';
      detail::write_meta(man, man.sim, elapsed());
      break;
    }
    case Subcommand::CheckNorm: {
      std::vector<ModelKind> models;
      if (man.all_models) models.assign(std::begin(kAllModels), std::end(kAllModels));
      else models.push_back(man.params.kind);
      std::mt19937_64 rng(man.seed);
      io::json rows = io::json::array();
      std::string csv = "model,U,samples,max_residual\n";
      for (ModelKind kind : models)
        for (double U : man.sweep.U_values) {
          if (kind == ModelKind::Linear && U != 0.0) continue;
          const ModelParams p = make_params(kind, man.params.delta_g, man.params.gamma_a, U, man.params.negate_linear);
          double worst = 0.0;
          for (int i = 0; i < man.norm_samples; ++i) worst = std::max(worst, norm_rate_residual(p, random_state(man.sim.N, rng)));
          rows.push_back({{"model", std::string(to_string(kind))}, {"U", U}, {"samples", man.norm_samples}, {"max_residual", worst}});
          csv += std::string(to_string(kind)) + ',' + io::format_double(U) + ',' + std::to_string(man.norm_samples) +
                 ',' + io::format_double(worst) + '\n';
          log << to_string(kind) << " U=" << io::format_double(U) << " max residual " << io::format_double(worst) << '\n';
        }
      if (man.wants(OutputFormat::Csv)) io::write_text(csv, man.path(".csv"));
      if (man.wants(OutputFormat::Json)) io::write_json({{"seed", man.seed}, {"results", rows}}, man.path(".json"));
      detail::write_meta(man, man.sim, elapsed());
      break;
    }
    case Subcommand::Winding: {
      io::json rows = io::json::array();
      std::string csv = "delta_g,mu,nu,winding_number,incoherent_reference\n";
      for (double dg : man.sweep.delta_g_grid) {
        const ModelParams p = make_params(ModelKind::Linear, dg, 0.0, 0.0, man.sweep.negate_linear);
        std::optional<int> w;
        try {
          w = winding_number(p.mu, p.nu);
        } catch (const DegenerateInput&) {
        }
        const double ref = incoherent_reference(p.mu, p.nu);
        csv += io::format_double(dg) + ',' + io::format_double(p.mu) + ',' + io::format_double(p.nu) + ',' +
               (w ? std::to_string(*w) : std::string()) + ',' + io::format_double(ref) + '\n';
        rows.push_back({{"delta_g", dg},
                        {"mu", p.mu},
                        {"nu", p.nu},
                        {"winding_number", w ? io::json(*w) : io::json(nullptr)},
                        {"incoherent_reference", ref}});
        log << "delta_g " << io::format_double(dg) << " winding " << (w ? std::to_string(*w) : "undefined") << '\n';
      }
      if (man.wants(OutputFormat::Csv)) io::write_text(csv, man.path(".csv"));
      if (man.wants(OutputFormat::Json)) io::write_json(rows, man.path(".json"));
      detail::write_meta(man, man.sim, elapsed());
      break;
    }
  }
  return code;
}

/// argv -> exit code: 0 ok, 1 usage, 2 integration divergence, 3 I/O.
inline int main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
  RunManifest man;
  try {
    man = parse_cli(args);
  } catch (const InfoRequested& info) {
    out << info.what() << '\n';
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    if (std::string_view(e.what()).find("usage:") == std::string_view::npos) err << usage_summary() << '\n';
    return kExitUsage;
  }
  try {
    return run(man, out);
  } catch (const IntegrationDiverged& e) {
    err << "error: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const io::IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace nlrl::cli
