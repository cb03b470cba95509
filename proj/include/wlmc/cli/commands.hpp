/**
 * @file commands.hpp
 * @brief The runner's subcommands as in-process functions.
 *
 * Every command returns its CSV text and manifest; writing is left to the
 * caller so tests and the acceptance driver can inspect results directly.
 * Results depend on the config and seed only, never on the thread count.
 */
#ifndef WLMC_CLI_COMMANDS_HPP
#define WLMC_CLI_COMMANDS_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wlmc/analysis.hpp"
#include "wlmc/analytic.hpp"
#include "wlmc/cli/config.hpp"
#include "wlmc/cli/output.hpp"
#include "wlmc/estimator.hpp"
#include "wlmc/loops.hpp"
#include "wlmc/statistics.hpp"

namespace wlmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitWindowNotFound = 3;

struct CommandResult {
  std::string csv;
  RunManifest manifest;
  int exit_code = kExitOk;
};

inline RunManifest start_manifest(const std::string& command, const ExperimentConfig& c) {
  RunManifest m;
  m.command = command;
  m.config_hash = config_hash(c);
  m.seed = c.ensemble.seed;
  m.canonical_config = c.canonical;
  return m;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Reference kernels

namespace detail {

inline std::optional<double> ln_plain_reference(const ExperimentConfig& c, std::span<const double> y, double t) {
  if (std::holds_alternative<Free>(c.potential)) return ln_kernel_free(y, c.x, t, c.m);
  if (auto h = std::get_if<Harmonic>(&c.potential)) return ln_kernel_ho(y, c.x, t, c.m, h->omega);
  if (auto d = std::get_if<DeltaWell>(&c.potential); d && c.ensemble.dim == 1)
    return std::log(kernel_delta(y[0], c.x[0], t, c.m, d->g));
  return std::nullopt;
}

}  // namespace detail

/// ln K where a closed form exists; for projected scans ln of (1/2)[K(x,y) - K(x,-y)].
inline std::optional<double> ln_reference(const ExperimentConfig& c, double t) {
  const auto plus = detail::ln_plain_reference(c, c.y, t);
  if (!plus || !c.projected) return plus;
  std::vector<double> minus_y(c.y);
  for (double& v : minus_y) v = -v;
  const auto minus = detail::ln_plain_reference(c, minus_y, t);
  const double r = std::exp(*minus - *plus);
  if (!(r < 1.0)) return std::nullopt;
  return *plus + std::log1p(-r) - std::log(2.0);
}

/// Exact level energy for the configured potential: the ground state, or the
/// first excited state of a projected scan.
inline std::optional<double> known_energy(const ExperimentConfig& c) {
  if (c.reference_energy) return c.reference_energy;
  const int n = c.projected ? 1 : 0;
  const int d = c.ensemble.dim;
  if (auto h = std::get_if<Harmonic>(&c.potential)) return energy_ho(n, d, h->omega);
  if (auto p = std::get_if<PoschlTeller>(&c.potential); p && n < p->nu) return energy_pt(n, p->nu, p->a, c.m);
  if (auto g = std::get_if<DeltaWell>(&c.potential); g && n == 0) return energy_delta(c.m, g->g);
  if (auto q = std::get_if<Coulomb>(&c.potential); q && d == 3 && n == 0) return energy_coulomb(1, c.m, q->alpha);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// kernel-scan

struct ScanRow {
  KernelEstimate estimate;
  std::optional<double> ln_analytic;
  std::uint64_t seed = 0;
};

inline std::uint64_t seed_for_t(const ExperimentConfig& c, std::size_t t_index) {
  if (c.shared_ensemble) return c.ensemble.seed;
  return derive_seed(c.ensemble.seed, {t_index});
}

/// One fresh ensemble (or n_ensembles of them) per t, seeded by derive_seed(seed, {t index}),
/// or the same ensemble at every t with scan.shared_ensemble.
inline std::vector<ScanRow> run_scan(const ExperimentConfig& c, Execution exec, RunManifest& manifest) {
  if (c.t_grid.empty()) throw Error(ErrorCode::ConfigInvalid, "tgrid: no t values configured");
  std::vector<ScanRow> rows;
  for (std::size_t i = 0; i < c.t_grid.size(); ++i) {
    const double t = c.t_grid[i];
    Stopwatch clock;
    EnsembleSpec spec = c.ensemble;
    spec.seed = seed_for_t(c, i);
    ScanRow row;
    row.seed = spec.seed;
    if (c.projected) {
      row.estimate = estimate_parity_projected(c.potential, c.y, c.x, t, c.m, LazyEnsemble(spec), c.method, exec,
                                               c.pairing);
    } else if (c.n_ensembles >= 2) {
      row.estimate =
          estimate_kernel_multi(c.potential, c.y, c.x, t, c.m, c.ensemble, c.n_ensembles, spec.seed, c.method, exec);
    } else {
      row.estimate = estimate_kernel(c.potential, c.y, c.x, t, c.m, LazyEnsemble(spec), c.method, exec);
    }
    row.ln_analytic = ln_reference(c, t);
    manifest.per_t_seeds.emplace_back(t, spec.seed);
    manifest.timings.emplace_back("t=" + format_real(t), clock.seconds());
    if (row.estimate.n_singular_events > 0)
      manifest.warnings.push_back("t=" + format_real(t) + ": " + std::to_string(row.estimate.n_singular_events) +
                                  " singular events");
    rows.push_back(std::move(row));
  }
  return rows;
}

inline KernelSeries to_series(const std::vector<ScanRow>& rows) {
  KernelSeries s;
  for (const auto& r : rows)
    if (std::isfinite(r.estimate.ln_value) && std::isfinite(r.estimate.sem_ln)) s.push(r.estimate, r.ln_analytic);
  return s;
}

inline void warn_skyscrapers(const KernelSeries& s, RunManifest& manifest) {
  if (s.size() < 3) return;
  for (std::size_t i : detect_skyscrapers(s))
    manifest.warnings.push_back("skyscraper at t=" + format_real(s.rows[i].t));
}

inline CommandResult cmd_kernel_scan(const ExperimentConfig& c, Execution exec) {
  CommandResult out;
  out.manifest = start_manifest("kernel-scan", c);
  Stopwatch clock;
  const auto rows = run_scan(c, exec, out.manifest);
  warn_skyscrapers(to_series(rows), out.manifest);

  Csv csv;
  stamp(csv, "kernel-scan", c);
  csv.meta("n_ensembles", std::to_string(c.n_ensembles));
  csv.meta("projected", c.projected ? "true" : "false");
  csv.header({"t", "ln_K_mc", "sem_ln", "mean_W", "ln_K_analytic", "n_singular_events"});
  for (const auto& r : rows) {
    const auto& e = r.estimate;
    csv.row({format_real(e.t), format_real(e.ln_value), format_real(e.sem_ln), format_real(e.mean_W),
             format_real(r.ln_analytic.value_or(kNaN)), std::to_string(e.n_singular_events)});
  }
  out.csv = csv.str();
  out.manifest.timings.emplace_back("total", clock.seconds());
  return out;
}

// ---------------------------------------------------------------------------
// energy-fit

/// Reads t, ln_K_mc and sem_ln from a kernel-scan CSV.
inline KernelSeries read_scan_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read scan '" + path + "'");
  std::string line;
  std::vector<std::string> header;
  KernelSeries s;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    return cells;
  };
  std::size_t it = 0, il = 0, is = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line);
    if (header.empty()) {
      header = cells;
      auto col = [&](const std::string& name) {
        auto p = std::find(header.begin(), header.end(), name);
        if (p == header.end()) throw Error(ErrorCode::IoFailure, "scan CSV lacks column '" + name + "'");
        return static_cast<std::size_t>(p - header.begin());
      };
      it = col("t");
      il = col("ln_K_mc");
      is = col("sem_ln");
      continue;
    }
    if (cells.size() != header.size()) throw Error(ErrorCode::IoFailure, "ragged row in scan CSV");
    const double t = std::stod(cells[it]), ln = std::stod(cells[il]), sem_ln = std::stod(cells[is]);
    if (std::isfinite(ln) && std::isfinite(sem_ln)) s.rows.push_back({t, ln, sem_ln, std::nullopt});
  }
  if (header.empty()) throw Error(ErrorCode::IoFailure, "scan CSV has no header");
  return s;
}

/// `scan_path` empty: run the scan described by the config first.
inline CommandResult cmd_energy_fit(const ExperimentConfig& c, Execution exec, const std::string& scan_path = {}) {
  CommandResult out;
  out.manifest = start_manifest("energy-fit", c);
  Stopwatch clock;
  KernelSeries series;
  if (scan_path.empty()) {
    series = to_series(run_scan(c, exec, out.manifest));
  } else {
    series = read_scan_csv(scan_path);
  }
  warn_skyscrapers(series, out.manifest);

  Window w;
  std::string source = "config";
  if (c.fit_window) {
    w = *c.fit_window;
  } else {
    source = "auto";
    w = detect_window(series, c.min_points, c.threshold);
  }
  const EnergyFit f = fit_energy(series, w, c.sign);
  const auto ref = known_energy(c);

  Csv csv;
  stamp(csv, "energy-fit", c);
  csv.meta("window_source", source);
  if (!scan_path.empty()) csv.meta("scan", scan_path);
  csv.header({"t_lo", "t_hi", "energy", "uncertainty", "intercept", "residual_rms", "chi2", "n_points", "spectral",
              "reference_energy", "deviation"});
  csv.row({format_real(f.window.t_lo), format_real(f.window.t_hi), format_real(f.energy), format_real(f.uncertainty),
           format_real(f.intercept), format_real(f.residual_rms), format_real(f.chi2), std::to_string(f.n_points),
           f.spectral ? "true" : "false", format_real(ref.value_or(kNaN)),
           format_real(ref ? f.energy - *ref : kNaN)});
  if (!f.spectral) out.manifest.warnings.push_back("fit residuals are not consistent with a single exponential");
  out.csv = csv.str();
  out.manifest.timings.emplace_back("total", clock.seconds());
  return out;
}

// ---------------------------------------------------------------------------
// pv-hist

struct PvHistogramData {
  std::vector<double> tv;
  Histogram histogram;
  std::optional<GofResult> gof;
  std::optional<GofResult> integrand_gof;
};

inline double histogram_t(const ExperimentConfig& c) {
  if (c.hist_t) return *c.hist_t;
  if (c.t_grid.size() == 1) return c.t_grid.front();
  throw Error(ErrorCode::ConfigInvalid, "histogram.t: required unless the t grid holds exactly one value");
}

/// Analytic density of t v: oscillator in d = 1 with y = x = 0 only.
inline std::optional<std::function<double(double)>> pv_density(const ExperimentConfig& c, double t) {
  auto h = std::get_if<Harmonic>(&c.potential);
  if (!h || c.ensemble.dim != 1 || c.y[0] != 0.0 || c.x[0] != 0.0) return std::nullopt;
  const double omega = h->omega;
  return std::function<double(double)>([t, omega](double v) { return pv_ho_series(v, t, omega); });
}

inline PvHistogramData pv_histogram_data(const ExperimentConfig& c, Execution exec) {
  const double t = histogram_t(c);
  EnsembleSpec spec = c.ensemble;
  spec.seed = seed_for_t(c, 0);
  PvHistogramData d;
  d.tv = loop_weights(c.potential, c.y, c.x, t, c.m, LazyEnsemble(spec), c.method, exec).tv;
  d.histogram = make_histogram(d.tv, c.n_bins);
  if (auto density = pv_density(c, t)) {
    d.gof = chi_square_gof(d.histogram, *density);
    d.integrand_gof = integrand_chi_square_gof(d.tv, *density, c.n_bins);
  }
  return d;
}

inline CommandResult cmd_pv_hist(const ExperimentConfig& c, Execution exec) {
  CommandResult out;
  out.manifest = start_manifest("pv-hist", c);
  Stopwatch clock;
  const double t = histogram_t(c);
  const PvHistogramData d = pv_histogram_data(c, exec);
  out.manifest.per_t_seeds.emplace_back(t, seed_for_t(c, 0));
  const auto density = pv_density(c, t);
  const auto* ho = std::get_if<Harmonic>(&c.potential);

  Csv csv;
  stamp(csv, "pv-hist", c);
  csv.meta("t", t);
  csv.meta("n_bins", std::to_string(c.n_bins));
  csv.header({"v_center", "v_lo", "v_hi", "count", "density", "analytic_density", "tail_diagnostic"});
  const auto [lo, hi] = std::minmax_element(d.tv.begin(), d.tv.end());
  if (*lo == *hi) {
    // Every loop has the same t v (free particle): one degenerate bin.
    csv.row({format_real(*lo), format_real(*lo), format_real(*hi), std::to_string(d.tv.size()), format_real(kNaN),
             format_real(kNaN), format_real(kNaN)});
  } else {
    const Histogram& h = d.histogram;
    for (std::size_t i = 0; i < h.n_bins(); ++i) {
      const double v = h.center(i);
      const double a = density ? (*density)(v) : kNaN;
      const double diag = ho && density && v > 0.0 && a > 0.0 ? tail_diagnostic(v, t, ho->omega, a) : kNaN;
      csv.row({format_real(v), format_real(h.bin_edges[i]), format_real(h.bin_edges[i + 1]),
               std::to_string(h.counts[i]), format_real(h.density(i)), format_real(a), format_real(diag)});
    }
  }
  if (d.gof) {
    csv.footer("chi2_p_value", d.gof->p_value);
    csv.footer("chi2", d.gof->chi2);
    csv.footer("chi2_dof", static_cast<double>(d.gof->dof));
    csv.footer("integrand_chi2_p_value", d.integrand_gof->p_value);
    csv.footer("integrand_chi2_log10_p_value", d.integrand_gof->log10_p_value);
    csv.footer("integrand_effective_size", d.integrand_gof->effective_size);
  }
  out.csv = csv.str();
  out.manifest.timings.emplace_back("total", clock.seconds());
  return out;
}

// ---------------------------------------------------------------------------
// classical

struct ClassicalStudy {
  std::vector<TrajectoryReport> reports;
  AveragedTrajectory average;
  std::vector<double> classical;
  std::size_t dominant_sim = 0;
};

/// n_sims independent ensembles (seed derive_seed(seed, {j})), each reduced to its dominant loop.
inline ClassicalStudy classical_study(const ExperimentConfig& c, Execution exec) {
  const auto* h = std::get_if<Harmonic>(&c.potential);
  if (!h) throw Error(ErrorCode::UnsupportedParameter, "classical: only the harmonic potential has a classical path here");
  if (c.ensemble.dim != 1) throw Error(ErrorCode::UnsupportedParameter, "classical: d must be 1");
  if (!c.classical_t) throw Error(ErrorCode::ConfigInvalid, "classical.t: required");
  const double t = *c.classical_t;
  ClassicalStudy s;
  for (std::size_t j = 0; j < c.n_sims; ++j) {
    EnsembleSpec spec = c.ensemble;
    spec.seed = derive_seed(c.ensemble.seed, {j});
    const LazyEnsemble e(spec);
    const LoopWeights w = loop_weights(c.potential, c.y, c.x, t, c.m, e, c.method, exec);
    s.reports.push_back(dominant_trajectory(e, w, c.y, c.x, t, c.m));
  }
  s.average = weighted_average_trajectory(s.reports);
  s.dominant_sim = static_cast<std::size_t>(
      std::max_element(s.average.weights.begin(), s.average.weights.end()) - s.average.weights.begin());
  for (double tau : s.average.tau) s.classical.push_back(classical_solution_ho(h->omega, t, c.y[0], c.x[0], tau));
  return s;
}

inline CommandResult cmd_classical(const ExperimentConfig& c, Execution exec) {
  CommandResult out;
  out.manifest = start_manifest("classical", c);
  Stopwatch clock;
  const ClassicalStudy s = classical_study(c, exec);
  for (std::size_t j = 0; j < c.n_sims; ++j)
    out.manifest.per_t_seeds.emplace_back(*c.classical_t, derive_seed(c.ensemble.seed, {j}));
  const TrajectoryReport& top = s.reports[s.dominant_sim];

  Csv csv;
  stamp(csv, "classical", c);
  csv.meta("t", *c.classical_t);
  csv.meta("n_sims", std::to_string(c.n_sims));
  csv.meta("lambda", top.params.lambda);
  csv.meta("mu", top.params.mu);
  csv.meta("dominant_weight_share", top.weight_share);
  csv.meta("dominant_simulation_weight", s.average.weights[s.dominant_sim]);
  csv.header({"tau", "dominant", "weighted_average", "standard_error", "classical"});
  for (std::size_t i = 0; i < s.average.tau.size(); ++i)
    csv.row({s.average.tau[i], top.positions[i], s.average.mean[i], s.average.standard_error[i], s.classical[i]});
  out.csv = csv.str();
  out.manifest.timings.emplace_back("total", clock.seconds());
  return out;
}

// ---------------------------------------------------------------------------
// generate-loops

inline CommandResult cmd_generate_loops(const ExperimentConfig& c, Execution exec) {
  CommandResult out;
  out.manifest = start_manifest("generate-loops", c);
  Stopwatch clock;
  const LoopEnsemble e = generate_ensemble(c.ensemble, exec);
  Csv csv;
  stamp(csv, "generate-loops", c);
  std::vector<std::string> header{"loop", "i", "u"};
  for (int k = 0; k < c.ensemble.dim; ++k) header.push_back("q" + std::to_string(k));
  csv.header(std::move(header));
  const double np = static_cast<double>(c.ensemble.n_points);
  for (std::size_t l = 0; l < e.size(); ++l)
    for (std::size_t i = 0; i <= c.ensemble.n_points; ++i) {
      std::vector<std::string> cells{std::to_string(l), std::to_string(i), format_real(static_cast<double>(i) / np)};
      for (double q : e[l].point(i)) cells.push_back(format_real(q));
      csv.row(std::move(cells));
    }
  out.csv = csv.str();
  out.manifest.timings.emplace_back("total", clock.seconds());
  return out;
}

// ---------------------------------------------------------------------------
// validate

/// Deliberate defects for checking that the validation suite notices them.
struct Faults {
  /// Loops drawn as if omega had unit variance (every q scaled by sqrt 2).
  bool unit_variance_omega = false;
  /// Analytic Coulomb smoothing with its sign flipped.
  bool flipped_smoothing_sign = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline LoopEnsemble validation_ensemble(LoopAlgorithm a, std::size_t n_loops, std::size_t n_points,
                                        std::uint64_t seed, const Faults& faults, Execution exec) {
  LoopEnsemble e = generate_ensemble(a, n_loops, n_points, 1, seed, exec);
  if (!faults.unit_variance_omega) return e;
  std::vector<UnitLoop> loops(e.begin(), e.end());
  for (auto& l : loops)
    for (double& q : l.data()) q *= std::sqrt(2.0);
  return LoopEnsemble(e.spec(), std::move(loops));
}

inline std::vector<double> column(const LoopEnsemble& e, std::size_t i) {
  std::vector<double> out;
  out.reserve(e.size());
  for (const auto& l : e) out.push_back(l.point(i)[0]);
  return out;
}

inline double sample_variance(std::span<const double> xs) {
  const double mu = mean(xs);
  CompensatedSum s;
  for (double x : xs) s.add((x - mu) * (x - mu));
  return s.value() / static_cast<double>(xs.size() - 1);
}

}  // namespace detail

inline std::vector<CheckResult> run_validation(const Faults& faults = {}, Execution exec = {}) {
  std::vector<CheckResult> checks;
  constexpr std::size_t kLoops = 20'000, kPoints = 64;
  constexpr LoopAlgorithm kAll[] = {LoopAlgorithm::VLoop, LoopAlgorithm::YLoop, LoopAlgorithm::Lsol};

  std::vector<LoopEnsemble> ensembles;
  for (auto a : kAll) ensembles.push_back(detail::validation_ensemble(a, kLoops, kPoints, 2024, faults, exec));

  {
    CheckResult r{"loop covariance", true, ""};
    for (std::size_t k = 0; k < 3; ++k)
      for (std::size_t i : {16u, 32u, 48u}) {
        const auto col = detail::column(ensembles[k], i);
        const double u = static_cast<double>(i) / kPoints;
        const double expected = u * (1.0 - u);
        const double var = detail::sample_variance(col);
        const double se = expected * std::sqrt(2.0 / (kLoops - 1.0));
        if (std::abs(var - expected) > 4.0 * se) {
          r.passed = false;
          r.detail += std::string(to_string(kAll[k])) + " i=" + std::to_string(i) + " var=" + format_real(var) +
                      " expected=" + format_real(expected) + "; ";
        }
      }
    checks.push_back(r);
  }
  {
    CheckResult r{"algorithm equivalence", true, ""};
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = a + 1; b < 3; ++b) {
        const double p = ks_two_sample(detail::column(ensembles[a], 32), detail::column(ensembles[b], 32)).p_value;
        if (!(p > 1e-3)) {
          r.passed = false;
          r.detail += std::string(to_string(kAll[a])) + "/" + std::string(to_string(kAll[b])) +
                      " KS p=" + format_real(p) + "; ";
        }
      }
    checks.push_back(r);
  }
  {
    CheckResult r{"generation determinism", true, ""};
    const LoopEnsemble serial = generate_ensemble(LoopAlgorithm::Lsol, 500, 40, 2, 7, Execution{1});
    const LoopEnsemble split = generate_ensemble(LoopAlgorithm::Lsol, 500, 40, 2, 7, Execution{3});
    if (!(serial == split)) {
      r.passed = false;
      r.detail = "ensembles differ between 1 and 3 workers";
    }
    checks.push_back(r);
  }
  {
    CheckResult r{"free kernel exactness", true, ""};
    const std::vector<double> y{0.3, -0.1}, x{-0.2, 0.4};
    for (double t : {0.5, 2.0, 9.0}) {
      const auto e = estimate_kernel(Free{}, y, x, t, 1.3, LazyEnsemble({LoopAlgorithm::VLoop, 50, 30, 2, 3}),
                                     Pointwise{}, exec);
      const double exact = ln_kernel_free(y, x, t, 1.3);
      if (std::abs(e.ln_value - exact) > 1e-14 * std::max(1.0, std::abs(exact)) || e.sem != 0.0) {
        r.passed = false;
        r.detail += "t=" + format_real(t) + " ln K=" + format_real(e.ln_value) + " exact=" + format_real(exact) + "; ";
      }
    }
    checks.push_back(r);
  }
  {
    // Segments kept at distance >= 0.4 from the origin with length 0.1.
    CheckResult sign{"smoothing sign uniformity", true, ""};
    CheckResult consistency{"smoothing consistency", true, ""};
    NormalStream rng(99);
    for (int k = 0; k < 200; ++k) {
      std::vector<double> prev(3), step(3), cur(3);
      double r2 = 0.0, s2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        prev[c] = rng();
        step[c] = rng();
        r2 += prev[c] * prev[c];
        s2 += step[c] * step[c];
      }
      const double scale = std::max(1.0, 0.5 / std::sqrt(r2));
      for (int c = 0; c < 3; ++c) {
        prev[c] *= scale;
        cur[c] = prev[c] + 0.1 * step[c] / std::sqrt(s2);
      }
      double analytic = segment_smoothed_coulomb(prev, cur, 1.0).value;
      if (faults.flipped_smoothing_sign) analytic = -analytic;
      const double numeric = segment_smoothed_yukawa(prev, cur, 1.0, 0.0, 1000).value;
      const double screened = segment_smoothed_yukawa(prev, cur, 1.0, 0.5, 4).value;
      if (!(analytic < 0.0 && numeric < 0.0 && screened < 0.0)) {
        sign.passed = false;
        if (sign.detail.empty()) sign.detail = "segment " + std::to_string(k) + " analytic=" + format_real(analytic);
      }
      if (std::abs(analytic - numeric) > 1e-6 * std::abs(numeric)) {
        consistency.passed = false;
        if (consistency.detail.empty())
          consistency.detail = "segment " + std::to_string(k) + " analytic=" + format_real(analytic) +
                               " numeric=" + format_real(numeric);
      }
    }
    checks.push_back(sign);
    checks.push_back(consistency);
  }
  return checks;
}

inline CommandResult cmd_validate(const Faults& faults = {}, Execution exec = {}) {
  CommandResult out;
  out.manifest.command = "validate";
  std::string text;
  for (const auto& c : run_validation(faults, exec)) {
    text += std::string(c.passed ? "PASS " : "FAIL ") + c.name + (c.detail.empty() ? "" : "  " + c.detail) + "\n";
    if (!c.passed) out.exit_code = kExitFailure;
  }
  out.csv = text;
  return out;
}

}  // namespace wlmc::cli

#endif  // WLMC_CLI_COMMANDS_HPP
