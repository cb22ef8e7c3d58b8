#include "catforge/commands.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "catforge/analysis.hpp"
#include "catforge/config.hpp"
#include "catforge/errors.hpp"
#include "catforge/parallel.hpp"
#include "catforge/serialize.hpp"
#include "catforge/state_generator.hpp"
#include "catforge/tomography.hpp"

namespace catforge {

namespace {

namespace fs = std::filesystem;

constexpr double kDefaultZeta0 = 2.0 * std::numbers::pi * 4.5e6;

struct OutputFile {
  std::string name;
  std::string content;
};

void commit(const fs::path& out_dir, const std::vector<OutputFile>& files) {
  fs::create_directories(out_dir);
  for (const auto& f : files) write_text(out_dir / f.name, f.content);
}

Squeeze read_squeeze(const RunConfig& cfg, const std::string& key,
                     std::optional<double> fallback) {
  const double eps = fallback ? cfg.get_double(key, *fallback)
                              : cfg.require_double(key);
  if (!(std::abs(eps) < 1.0)) {
    throw ConfigError("config key '" + key + "' must satisfy |eps| < 1");
  }
  return Squeeze(eps);
}

int read_cutoff(const RunConfig& cfg, const CommandOptions& opt) {
  const int cutoff = opt.cutoff ? *opt.cutoff
                                : cfg.get_int("scheme.cutoff",
                                              kDefaultTwoModeCutoff);
  if (cutoff < 4) {
    throw ConfigError("config key 'scheme.cutoff' must be >= 4");
  }
  return cutoff;
}

double read_eta(const RunConfig& cfg) {
  const double eta = cfg.get_double("scheme.eta", 1.0);
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw ConfigError("config key 'scheme.eta' must lie in [0, 1]");
  }
  return eta;
}

double read_zeta0(const RunConfig& cfg) {
  const double zeta0 = cfg.get_double("scheme.zeta0", kDefaultZeta0);
  if (!(zeta0 > 0.0)) {
    throw ConfigError("config key 'scheme.zeta0' must be positive");
  }
  return zeta0;
}

// [scheme] with eps_plus/eps_minus given directly, or picked from row
// table_row of delta_table_path.
SchemeParams read_scheme(const RunConfig& cfg, const CommandOptions& opt) {
  SchemeParams p;
  p.eta = read_eta(cfg);
  p.cutoff = read_cutoff(cfg, opt);
  if (auto table = cfg.get("scheme.delta_table_path")) {
    const auto rows = load_delta_table(cfg.resolve_path(*table), read_zeta0(cfg));
    const int row = cfg.require_int("scheme.table_row");
    if (row < 0 || static_cast<std::size_t>(row) >= rows.size()) {
      throw ConfigError("config key 'scheme.table_row' is out of range");
    }
    p.eps_plus = Squeeze(rows[static_cast<std::size_t>(row)].eps_plus);
    p.eps_minus = Squeeze(rows[static_cast<std::size_t>(row)].eps_minus);
  } else {
    p.eps_plus = read_squeeze(cfg, "scheme.eps_plus", std::nullopt);
    p.eps_minus = read_squeeze(cfg, "scheme.eps_minus", 0.0);
  }
  if (p.eps_plus.eps() == 0.0) {
    throw ConfigError("config key 'scheme.eps_plus' must be nonzero");
  }
  p.validate();
  return p;
}

struct GridSpec {
  std::vector<double> x_axis;
  std::vector<double> p_axis;
};

GridSpec read_grid(const RunConfig& cfg, const std::string& section,
                   double extent, double step_default) {
  const double step = cfg.get_double(section + ".step", step_default);
  if (!(step > 0.0)) {
    throw ConfigError("config key '" + section + ".step' must be positive");
  }
  const double x_min = cfg.get_double(section + ".x_min", -extent);
  const double x_max = cfg.get_double(section + ".x_max", extent);
  const double p_min = cfg.get_double(section + ".p_min", -extent);
  const double p_max = cfg.get_double(section + ".p_max", extent);
  if (!(x_max >= x_min) || !(p_max >= p_min)) {
    throw ConfigError("grid bounds in [" + section + "] are inverted");
  }
  return {uniform_axis(x_min, x_max, step), uniform_axis(p_min, p_max, step)};
}

struct FitSpec {
  std::vector<double> alpha_grid;
  Parity parity = Parity::even;
};

FitSpec read_fit(const RunConfig& cfg) {
  FitSpec f;
  const double lo = cfg.get_double("fit.alpha_min", 0.0);
  const double hi = cfg.get_double("fit.alpha_max", 2.2);
  const double step = cfg.get_double("fit.alpha_step", 0.05);
  if (!(lo >= 0.0) || !(hi >= lo) || !(step > 0.0)) {
    throw ConfigError("[fit] needs 0 <= alpha_min <= alpha_max and alpha_step > 0");
  }
  f.alpha_grid = uniform_axis(lo, hi, step);
  const std::string parity = cfg.get_string("fit.parity", "even");
  if (parity == "even") {
    f.parity = Parity::even;
  } else if (parity == "odd") {
    f.parity = Parity::odd;
  } else {
    throw ConfigError("config key 'fit.parity' must be 'even' or 'odd'");
  }
  return f;
}

const char* parity_name(Parity p) { return p == Parity::even ? "even" : "odd"; }

// ---------------------------------------------------------------------------

int cmd_generate(const RunConfig& cfg, const CommandOptions& opt,
                 std::ostream& out) {
  const SchemeParams scheme = read_scheme(cfg, opt);

  const GenerationResult result = lossy_state(scheme);
  const std::vector<double> pn = photon_distribution(result.rho_plus);
  const double pur = purity(result.rho_plus);
  const double mean_n = mean_photon(result.rho_plus);

  Json summary;
  summary["command"] = "generate";
  summary["eps_plus"] = scheme.eps_plus.eps();
  summary["eps_minus"] = scheme.eps_minus.eps();
  summary["eta"] = scheme.eta;
  summary["cutoff"] = scheme.cutoff;
  summary["beta_plus"] = scheme.beta_plus();
  summary["success_weight"] = result.success_weight;
  summary["c0"] = result.c0;
  summary["purity"] = pur;
  summary["mean_photon"] = mean_n;

  commit(opt.out_dir, {{"rho_plus.json", dump(to_json(result))},
                       {"photon_distribution.csv", photon_distribution_csv(pn)},
                       {"summary.json", dump(summary)}});
  out << fmt::format("success_weight={} c0={} purity={} mean_photon={}\n",
                     result.success_weight, result.c0, pur, mean_n);
  return kExitOk;
}

int cmd_wigner(const RunConfig& cfg, const CommandOptions& opt,
               std::ostream& out) {
  const GridSpec grid_spec = read_grid(cfg, "wigner", 6.0, 0.05);
  std::optional<DensityMatrix> loaded;
  std::optional<SchemeParams> scheme;
  if (auto path = cfg.get("wigner.state_path")) {
    loaded = as_density(state_from_json(read_json(cfg.resolve_path(*path))));
    if (loaded->n_modes() != 1) {
      throw ConfigError("config key 'wigner.state_path' must hold a single-mode state");
    }
  } else {
    scheme = read_scheme(cfg, opt);
  }

  const DensityMatrix rho = loaded ? *loaded : lossy_state(*scheme).rho_plus;
  const WignerGrid grid = wigner(rho, grid_spec.x_axis, grid_spec.p_axis);
  const WignerMinimum minimum = min_wigner(grid);
  const double w00 = wigner_at(rho, 0.0, 0.0);

  Json summary;
  summary["command"] = "wigner";
  summary["min_w"] = minimum.value;
  summary["min_x"] = minimum.x;
  summary["min_p"] = minimum.p;
  summary["w00"] = w00;
  summary["grid_integral"] = grid.integral();

  commit(opt.out_dir, {{"wigner.csv", wigner_csv(grid)},
                       {"wigner.json", dump(to_json(grid))},
                       {"summary.json", dump(summary)}});
  out << fmt::format("min_W={} at x={} p={}; W(0,0)={}\n", minimum.value,
                     minimum.x, minimum.p, w00);
  return kExitOk;
}

struct SweepPoint {
  SchemeParams params;
  std::optional<double> zeta_delta;
};

struct SweepRow {
  double mean_n_plus;
  double mean_n_minus;
  double purity;
  double c0;
  double alpha_star_sq;
  double fidelity_star;
  double min_w;
};

std::vector<double> read_sweep_values(const RunConfig& cfg) {
  std::vector<double> values = cfg.get_list("sweep.values");
  if (!values.empty()) return values;
  const double start = cfg.require_double("sweep.start");
  const double stop = cfg.require_double("sweep.stop");
  const int count = cfg.require_int("sweep.count");
  if (count < 1) {
    throw ConfigError("config key 'sweep.count' must be >= 1");
  }
  for (int k = 0; k < count; ++k) {
    values.push_back(count == 1 ? start
                                : start + (stop - start) * k / (count - 1));
  }
  return values;
}

int cmd_sweep(const RunConfig& cfg, const CommandOptions& opt,
              std::ostream& out) {
  const std::string axis = cfg.require_string("sweep.axis");
  const FitSpec fit = read_fit(cfg);
  const double extent = cfg.get_double("sweep.wigner_extent", 4.0);
  const double wstep = cfg.get_double("sweep.wigner_step", 0.05);
  if (!(extent > 0.0) || !(wstep > 0.0)) {
    throw ConfigError("[sweep] wigner_extent and wigner_step must be positive");
  }
  const std::vector<double> waxis = uniform_axis(-extent, extent, wstep);

  std::vector<SweepPoint> points;
  if (axis == "table") {
    const std::string path =
        cfg.get("sweep.table_path").value_or(cfg.get_string("scheme.delta_table_path", ""));
    if (path.empty()) {
      throw ConfigError("missing required config key 'sweep.table_path'");
    }
    SchemeParams base;
    base.eta = read_eta(cfg);
    base.cutoff = read_cutoff(cfg, opt);
    const auto rows = load_delta_table(cfg.resolve_path(path), read_zeta0(cfg));
    for (const auto& r : rows) {
      SchemeParams p = base;
      p.eps_plus = Squeeze(r.eps_plus);
      p.eps_minus = Squeeze(r.eps_minus);
      if (p.eps_plus.eps() == 0.0) {
        throw ConfigError("delta table rows need eps_plus != 0");
      }
      points.push_back({p, r.zeta_delta});
    }
  } else if (axis == "eps_minus" || axis == "eta") {
    const SchemeParams base = read_scheme(cfg, opt);
    for (const double v : read_sweep_values(cfg)) {
      SchemeParams p = base;
      if (axis == "eps_minus") {
        if (!(std::abs(v) < 1.0)) {
          throw ConfigError("sweep value " + format_double(v) +
                            " is not a valid eps_minus");
        }
        p.eps_minus = Squeeze(v);
      } else {
        if (!(v >= 0.0 && v <= 1.0)) {
          throw ConfigError("sweep value " + format_double(v) +
                            " is not a valid eta");
        }
        p.eta = v;
      }
      points.push_back({p, std::nullopt});
    }
  } else {
    throw ConfigError("config key 'sweep.axis' must be eps_minus, eta or table");
  }
  if (points.empty()) {
    throw ConfigError("sweep has no points");
  }

  std::vector<SweepRow> rows(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const SchemeParams& p = points[i].params;
    const TwoModeSubtraction exact = ancilla_subtract_exact(p);
    const DensityMatrix lossless = reduce_to_main(exact.two_mode);
    const DensityMatrix rho = apply_loss(lossless, p.eta);
    const DensityMatrix rho_minus =
        apply_loss(partial_trace(exact.two_mode, KeepMode::minus), p.eta);
    const CatFit cat = best_cat_fit(rho, fit.parity, fit.alpha_grid);
    const WignerMinimum wmin = min_wigner(wigner(rho, waxis, waxis));
    rows[i] = {mean_photon(rho),
               mean_photon(rho_minus),
               purity(rho),
               mixture_weight_c0(lossless, approx_phi(p)),
               cat.alpha_star * cat.alpha_star,
               cat.fidelity_star,
               wmin.value};
  });

  std::string csv =
      "index,zeta_delta,eps_plus,eps_minus,eta,mean_n_plus,mean_n_minus,"
      "purity,c0,alpha_star_sq,fidelity_star,min_w\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i].params;
    const auto& r = rows[i];
    csv += fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{}\n", i,
        points[i].zeta_delta ? format_double(*points[i].zeta_delta) : "",
        p.eps_plus.eps(), p.eps_minus.eps(), p.eta, r.mean_n_plus,
        r.mean_n_minus, r.purity, r.c0, r.alpha_star_sq, r.fidelity_star,
        r.min_w);
  }
  Json summary;
  summary["command"] = "sweep";
  summary["axis"] = axis;
  summary["points"] = points.size();
  summary["fit_parity"] = parity_name(fit.parity);
  commit(opt.out_dir, {{"sweep.csv", csv}, {"summary.json", dump(summary)}});
  out << fmt::format("sweep: {} points along {}\n", points.size(), axis);
  return kExitOk;
}

int cmd_tomo(const RunConfig& cfg, const CommandOptions& opt,
             std::ostream& out) {
  MleConfig mle;
  mle.cutoff = cfg.get_int("tomo.mle_cutoff", 12);
  mle.max_iters = cfg.get_int("tomo.max_iters", 2000);
  mle.stop_tol = cfg.get_double("tomo.stop_tol", 1e-7);
  if (cfg.has("tomo.phase_bins")) mle.phase_bins = cfg.require_int("tomo.phase_bins");
  mle.validate();

  std::optional<QuadratureRecord> external;
  std::optional<DensityMatrix> truth;
  if (auto path = cfg.get("tomo.samples_path")) {
    external = read_quadrature_csv(cfg.resolve_path(*path));
    if (external->samples.empty()) {
      throw ConfigError("external quadrature record has no samples");
    }
  }
  const std::string truth_kind =
      cfg.get_string("tomo.truth", external ? "none" : "scheme");
  std::optional<SchemeParams> scheme;
  if (truth_kind == "vacuum") {
    truth = DensityMatrix::from_pure(
        PureState::fock(0, std::max(mle.cutoff, read_cutoff(cfg, opt))));
  } else if (truth_kind == "state") {
    truth = as_density(
        state_from_json(read_json(cfg.resolve_path(cfg.require_string("tomo.state_path")))));
    if (truth->n_modes() != 1) {
      throw ConfigError("config key 'tomo.state_path' must hold a single-mode state");
    }
  } else if (truth_kind == "scheme") {
    scheme = read_scheme(cfg, opt);
  } else if (truth_kind != "none") {
    throw ConfigError("config key 'tomo.truth' must be vacuum, scheme, state or none");
  }
  if (!external && truth_kind == "none") {
    throw ConfigError("tomo needs either 'tomo.samples_path' or a truth state");
  }

  const auto n_samples = static_cast<std::size_t>(cfg.get_int("tomo.n_samples", 22000));
  if (n_samples < 1) {
    throw ConfigError("config key 'tomo.n_samples' must be >= 1");
  }
  const std::uint64_t seed = opt.seed ? *opt.seed : cfg.get_uint64("tomo.seed", 1);
  PhaseScheme phases = UniformRandomPhases{};
  const std::string phase_text = cfg.get_string("tomo.phases", "uniform_random");
  if (phase_text != "uniform_random") {
    FixedPhases fixed{cfg.get_list("tomo.phases")};
    for (const double th : fixed.phases) {
      if (!(th >= 0.0 && th < std::numbers::pi)) {
        throw ConfigError("config key 'tomo.phases' entries must lie in [0, pi)");
      }
    }
    phases = std::move(fixed);
  }

  // Computation.
  if (scheme) truth = lossy_state(*scheme).rho_plus;
  const QuadratureRecord record =
      external ? *external : sample_quadratures(*truth, n_samples, phases, seed);
  const MleResult result = mle_reconstruct(record, mle);

  Json summary;
  summary["command"] = "tomo";
  summary["n_samples"] = record.samples.size();
  summary["seed"] = record.seed;
  summary["source"] = record.source;
  summary["mle_cutoff"] = mle.cutoff;
  summary["iterations"] = result.diagnostics.iterations;
  summary["converged"] = result.diagnostics.converged;
  summary["diluted_steps"] = result.diagnostics.diluted_steps;
  summary["excluded_samples"] = result.diagnostics.excluded_samples;
  summary["final_loglikelihood"] = result.diagnostics.loglikelihood.back();
  std::optional<double> closed_loop;
  if (truth) {
    const int common = std::max(truth->cutoff(), result.rho_hat.cutoff());
    closed_loop = fidelity(resize(result.rho_hat, common), resize(*truth, common));
    summary["fidelity"] = *closed_loop;
  }

  std::vector<OutputFile> files;
  if (!external) {
    files.push_back({"samples.csv", quadrature_csv(record)});
    files.push_back({"samples.meta.json", dump(quadrature_metadata(record))});
  }
  files.push_back({"rho_hat.json", dump(to_json(result.rho_hat))});
  files.push_back({"likelihood.csv", likelihood_csv(result.diagnostics.loglikelihood)});
  files.push_back({"summary.json", dump(summary)});
  commit(opt.out_dir, files);

  out << fmt::format("iterations={} converged={}", result.diagnostics.iterations,
                     result.diagnostics.converged);
  if (closed_loop) out << fmt::format(" fidelity={}", *closed_loop);
  out << "\n";
  return kExitOk;
}

}  // namespace

int run_command(std::string_view name, const CommandOptions& options,
                std::ostream& out, std::ostream& err) {
  try {
    if (options.cutoff && *options.cutoff < 4) {
      throw ConfigError("--cutoff must be >= 4");
    }
    if (fs::exists(options.out_dir) && !fs::is_directory(options.out_dir)) {
      throw ConfigError("output path " + options.out_dir.string() +
                        " exists and is not a directory");
    }
    const RunConfig cfg = RunConfig::from_file(options.config_path);
    if (name == "generate") return cmd_generate(cfg, options, out);
    if (name == "wigner") return cmd_wigner(cfg, options, out);
    if (name == "sweep") return cmd_sweep(cfg, options, out);
    if (name == "tomo") return cmd_tomo(cfg, options, out);
    throw ConfigError("unknown command '" + std::string(name) + "'");
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace catforge
