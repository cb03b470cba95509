/**
 * @file analysis.hpp
 * @brief Energy fits on ln K(t), window and skyscraper detection,
 *        histogram goodness of fit and dominant-trajectory studies.
 */
#ifndef WLMC_ANALYSIS_HPP
#define WLMC_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "wlmc/errors.hpp"
#include "wlmc/estimator.hpp"
#include "wlmc/loops.hpp"
#include "wlmc/statistics.hpp"

namespace wlmc {

struct SeriesRow {
  double t = 0.0;
  double ln_value = 0.0;
  double sem_ln = 0.0;
  std::optional<double> ln_analytic;
};

struct KernelSeries {
  std::vector<SeriesRow> rows;

  void push(const KernelEstimate& e, std::optional<double> ln_analytic = std::nullopt) {
    rows.push_back({e.t, e.ln_value, e.sem_ln, ln_analytic});
  }
  std::size_t size() const noexcept { return rows.size(); }
};

inline void validate(const KernelSeries& s) {
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    detail::require(s.rows[i].sem_ln >= 0.0, ErrorCode::InvalidArgument, "sem_ln must be non-negative");
    if (i > 0)
      detail::require(s.rows[i].t > s.rows[i - 1].t, ErrorCode::InvalidArgument, "t must be strictly increasing");
  }
}

struct Window {
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// Which curve is fitted: ln K (bound_below) or -ln K (bound_above).
/// Either way the returned energy is -d ln K / dt.
enum class EnergySign { BoundBelow, BoundAbove };

struct EnergyFit {
  double energy = 0.0;
  double uncertainty = 0.0;
  Window window;
  /// Intercept of ln K at t = 0.
  double intercept = 0.0;
  double residual_rms = 0.0;
  double chi2 = 0.0;
  std::size_t n_points = 0;
  /// False when the window is visibly curved: chi2 p-value below 1e-3 for
  /// weighted fits, or residual_rms above 1e-9 (1 + max |ln K|) for noiseless input.
  bool spectral = true;
};

namespace detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;
  double residual_rms = 0.0;
  double chi2 = 0.0;
};

/// Weighted least squares with weights 1/sigma^2; unit weights (and an error
/// from the scatter) when any sigma is zero.
inline LineFit fit_line(std::span<const double> t, std::span<const double> y, std::span<const double> sigma) {
  const std::size_t n = t.size();
  const bool weighted = std::all_of(sigma.begin(), sigma.end(), [](double s) { return s > 0.0; });
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = weighted ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
  CompensatedSum s_w, s_t, s_y;
  for (std::size_t i = 0; i < n; ++i) {
    s_w.add(w[i]);
    s_t.add(w[i] * t[i]);
    s_y.add(w[i] * y[i]);
  }
  const double sw = s_w.value();
  const double tbar = s_t.value() / sw;
  const double ybar = s_y.value() / sw;
  CompensatedSum s_tt, s_ty;
  for (std::size_t i = 0; i < n; ++i) {
    s_tt.add(w[i] * (t[i] - tbar) * (t[i] - tbar));
    s_ty.add(w[i] * (t[i] - tbar) * (y[i] - ybar));
  }
  require(s_tt.value() > 0.0, ErrorCode::DegenerateWindow, "all points share one t value");
  LineFit f;
  f.slope = s_ty.value() / s_tt.value();
  f.intercept = ybar - f.slope * tbar;
  CompensatedSum rr, chi;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * t[i]);
    rr.add(r * r);
    chi.add(w[i] * r * r);
  }
  f.residual_rms = std::sqrt(rr.value() / static_cast<double>(n));
  f.chi2 = chi.value();
  if (weighted) {
    f.slope_error = std::sqrt(1.0 / s_tt.value());
  } else {
    const double s2 = n > 2 ? rr.value() / static_cast<double>(n - 2) : 0.0;
    f.slope_error = std::sqrt(s2 / s_tt.value());
  }
  return f;
}

}  // namespace detail

/// Weighted least-squares slope of ln K over the rows with t in `window`.
inline EnergyFit fit_energy(const KernelSeries& series, Window window, EnergySign sign = EnergySign::BoundBelow) {
  validate(series);
  detail::require(window.t_lo < window.t_hi, ErrorCode::DegenerateWindow, "window must satisfy t_lo < t_hi");
  const double tol = 1e-9 * std::max(1.0, std::abs(window.t_hi));
  std::vector<double> t, y, s;
  for (const auto& r : series.rows) {
    if (r.t < window.t_lo - tol || r.t > window.t_hi + tol) continue;
    detail::require(std::isfinite(r.ln_value), ErrorCode::NonPositiveProjection,
                    "non-positive kernel value inside the fit window");
    t.push_back(r.t);
    y.push_back(sign == EnergySign::BoundBelow ? r.ln_value : -r.ln_value);
    s.push_back(r.sem_ln);
  }
  detail::require(t.size() >= 3, ErrorCode::DegenerateWindow, "fit window holds fewer than 3 points");
  const detail::LineFit f = detail::fit_line(t, y, s);
  EnergyFit out;
  out.energy = sign == EnergySign::BoundBelow ? -f.slope : f.slope;
  out.uncertainty = f.slope_error;
  out.window = window;
  out.intercept = sign == EnergySign::BoundBelow ? f.intercept : -f.intercept;
  out.residual_rms = f.residual_rms;
  out.chi2 = f.chi2;
  out.n_points = t.size();
  if (std::all_of(s.begin(), s.end(), [](double x) { return x > 0.0; })) {
    const double dof = static_cast<double>(t.size() - 2);
    out.spectral = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), f.chi2)) >= 1e-3;
  } else {
    double scale = 0.0;
    for (double v : y) scale = std::max(scale, std::abs(v));
    out.spectral = f.residual_rms <= 1e-9 * (1.0 + scale);
  }
  return out;
}

/// E_1 from a parity-projected series; non-positive values in the window are an error.
inline EnergyFit first_excited_energy(const KernelSeries& projected, Window window) {
  return fit_energy(projected, window, EnergySign::BoundBelow);
}

/// Longest contiguous run of rows consistent with a single straight line.
///
/// A run qualifies when every normalized residual of its weighted line fit is
/// at most `residual_threshold` and, where ln_analytic is known, every point
/// lies within 3 sem_ln of it. Ties go to the earliest run.
inline Window detect_window(const KernelSeries& series, std::size_t min_points, double residual_threshold) {
  validate(series);
  detail::require(min_points >= 3, ErrorCode::InvalidArgument, "min_points must be >= 3");
  detail::require(series.size() >= min_points, ErrorCode::WindowNotFound, "series shorter than min_points");
  const auto& rows = series.rows;
  const std::size_t n = rows.size();
  auto scale = [&](std::size_t i) {
    return std::max(rows[i].sem_ln, 1e-9 * (1.0 + std::abs(rows[i].ln_value)));
  };
  std::vector<bool> agrees(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(rows[i].ln_value)) agrees[i] = false;
    if (rows[i].ln_analytic && !(std::abs(rows[i].ln_value - *rows[i].ln_analytic) <= 3.0 * rows[i].sem_ln))
      agrees[i] = false;
  }
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t len = n; len >= min_points && !best; --len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      const std::size_t j = i + len;
      if (!std::all_of(agrees.begin() + i, agrees.begin() + j, [](bool b) { return b; })) continue;
      std::vector<double> t, y, s;
      for (std::size_t k = i; k < j; ++k) {
        t.push_back(rows[k].t);
        y.push_back(rows[k].ln_value);
        s.push_back(scale(k));
      }
      const detail::LineFit f = detail::fit_line(t, y, s);
      bool ok = true;
      for (std::size_t k = 0; k < t.size() && ok; ++k)
        ok = std::abs(y[k] - (f.intercept + f.slope * t[k])) <= residual_threshold * s[k];
      if (ok) {
        best = {i, j - 1};
        break;
      }
    }
  }
  if (!best) throw Error(ErrorCode::WindowNotFound, "no run of points is consistent with a straight line");
  return {rows[best->first].t, rows[best->second].t};
}

/// Interior indices i where ln K has a local extremum that stands out from the
/// straight line through its neighbours by more than 3 combined sem_ln.
inline std::vector<std::size_t> detect_skyscrapers(const KernelSeries& series) {
  validate(series);
  const auto& r = series.rows;
  std::vector<double> score(r.size(), 0.0);
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const double left = r[i].ln_value - r[i - 1].ln_value;
    const double right = r[i + 1].ln_value - r[i].ln_value;
    if (!(left * right < 0.0)) continue;
    const double w = (r[i].t - r[i - 1].t) / (r[i + 1].t - r[i - 1].t);
    const double baseline = (1.0 - w) * r[i - 1].ln_value + w * r[i + 1].ln_value;
    const double sigma = std::sqrt(r[i].sem_ln * r[i].sem_ln + (1.0 - w) * (1.0 - w) * r[i - 1].sem_ln * r[i - 1].sem_ln +
                                   w * w * r[i + 1].sem_ln * r[i + 1].sem_ln);
    const double z = std::abs(r[i].ln_value - baseline) / sigma;
    if (z > 3.0) score[i] = z;
  }
  // A spike pulls the baselines of its neighbours, so they can flag too; keep the strongest.
  std::vector<std::size_t> hits;
  for (std::size_t i = 1; i + 1 < r.size(); ++i)
    if (score[i] > 0.0 && score[i] >= score[i - 1] && score[i] >= score[i + 1]) hits.push_back(i);
  return hits;
}

// ---------------------------------------------------------------------------
// Goodness of fit

struct GofResult {
  double p_value = 0.0;
  /// Stays finite where p_value underflows to 0.
  double log10_p_value = 0.0;
  double chi2 = 0.0;
  std::size_t dof = 0;
  std::size_t n_groups = 0;
  /// Kish effective sample size (weighted tests only).
  double effective_size = 0.0;
};

namespace detail {

inline double bin_integral(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
}

/// Adjacent bins merged until each group expects at least `threshold`; a short
/// remainder joins the last group.
inline std::vector<std::pair<std::size_t, std::size_t>> merge_bins(std::span<const double> expected, double threshold) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::size_t start = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    acc += expected[i];
    if (acc >= threshold) {
      groups.emplace_back(start, i + 1);
      start = i + 1;
      acc = 0.0;
    }
  }
  if (start < expected.size()) {
    if (groups.empty())
      groups.emplace_back(start, expected.size());
    else
      groups.back().second = expected.size();
  }
  return groups;
}

/// log10 of the chi-square survival function. Below 1e-300 the leading terms
/// of the asymptotic series of Q(a, x) are used, a = dof / 2, x = chi2 / 2.
inline double log10_chi2_sf(double chi2, std::size_t dof) {
  const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(static_cast<double>(dof)), chi2));
  if (p > 1e-300) return std::log10(p);
  const double a = 0.5 * static_cast<double>(dof), x = 0.5 * chi2;
  const double ln_q = (a - 1.0) * std::log(x) - x - std::lgamma(a) +
                      std::log1p((a - 1.0) / x + (a - 1.0) * (a - 2.0) / (x * x));
  return ln_q / std::numbers::ln10;
}

inline GofResult pearson(std::span<const double> observed, std::span<const double> expected, double threshold,
                         std::size_t constraints) {
  const auto groups = merge_bins(expected, threshold);
  require(groups.size() > constraints, ErrorCode::InsufficientCounts,
          "too few expected counts to form a chi-square test");
  GofResult g;
  CompensatedSum chi;
  for (auto [a, b] : groups) {
    double o = 0.0, e = 0.0;
    for (std::size_t i = a; i < b; ++i) {
      o += observed[i];
      e += expected[i];
    }
    if (e > 0.0) chi.add((o - e) * (o - e) / e);
  }
  g.chi2 = chi.value();
  g.n_groups = groups.size();
  g.dof = groups.size() - constraints;
  g.p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(static_cast<double>(g.dof)), g.chi2));
  g.log10_p_value = log10_chi2_sf(g.chi2, g.dof);
  return g;
}

}  // namespace detail

inline constexpr double kMinExpectedCount = 5.0;

/// Pearson chi-square of a histogram against a normalized density.
/// Expected counts are N times the density integrated over each bin.
inline GofResult chi_square_gof(const Histogram& h, const std::function<double(double)>& density) {
  detail::require(static_cast<double>(h.total) >= 2.0 * kMinExpectedCount, ErrorCode::InsufficientCounts,
                  "histogram holds too few counts");
  const double n = static_cast<double>(h.total);
  std::vector<double> obs(h.n_bins()), expected(h.n_bins());
  for (std::size_t i = 0; i < h.n_bins(); ++i) {
    obs[i] = static_cast<double>(h.counts[i]);
    expected[i] = n * detail::bin_integral(density, h.bin_edges[i], h.bin_edges[i + 1]);
  }
  return detail::pearson(obs, expected, kMinExpectedCount, 1);
}

/// Pearson chi-square of the integrand histogram P(v) e^{-v}.
///
/// Bins hold equal shares of the model integrand P(v) e^{-v} over
/// [min(0, min tv), max tv]; the density is assumed to vanish below that. The
/// samples, weighted by e^{-v}, are normalized to N entries and compared with
/// N / n_bins per bin. An ensemble that never reaches the low-v region where
/// the integrand lives leaves those bins empty. The statistic treats the
/// reweighted histogram as if it held N independent entries, so it ignores
/// the loss of effective sample size; `effective_size` reports that loss.
inline GofResult integrand_chi_square_gof(std::span<const double> tv, const std::function<double(double)>& density,
                                          std::size_t n_bins) {
  detail::require(n_bins >= 2 && static_cast<double>(tv.size()) >= kMinExpectedCount * static_cast<double>(n_bins),
                  ErrorCode::InsufficientCounts, "too few samples");
  const auto [smin, smax] = std::minmax_element(tv.begin(), tv.end());
  const double shift = *smin;
  const double lo = std::min(0.0, *smin), hi = *smax;
  detail::require(hi > lo, ErrorCode::InsufficientCounts, "all samples coincide");
  auto integrand = [&](double v) { return density(v) * std::exp(-(v - shift)); };

  // cumulative model mass on a fine grid, then equal-share edges by linear interpolation
  const std::size_t n_grid = 8 * n_bins;
  std::vector<double> grid(n_grid + 1), cum(n_grid + 1, 0.0);
  for (std::size_t k = 0; k <= n_grid; ++k) grid[k] = lo + (hi - lo) * static_cast<double>(k) / n_grid;
  grid.back() = hi;
  for (std::size_t k = 0; k < n_grid; ++k) cum[k + 1] = cum[k] + detail::bin_integral(integrand, grid[k], grid[k + 1]);
  const double z = cum.back();
  detail::require(z > 0.0 && std::isfinite(z), ErrorCode::InsufficientCounts,
                  "integrand vanishes over the sampled range");
  std::vector<double> edges{lo};
  for (std::size_t b = 1; b < n_bins; ++b) {
    const double target = z * static_cast<double>(b) / n_bins;
    const auto it = std::lower_bound(cum.begin(), cum.end(), target);
    const std::size_t k = static_cast<std::size_t>(it - cum.begin());
    const double f = (target - cum[k - 1]) / (cum[k] - cum[k - 1]);
    edges.push_back(std::max(edges.back(), grid[k - 1] + f * (grid[k] - grid[k - 1])));
  }
  edges.push_back(hi);

  std::vector<double> wsum(n_bins, 0.0);
  CompensatedSum sw, sw2;
  for (double v : tv) {
    auto i = static_cast<std::size_t>(std::upper_bound(edges.begin() + 1, edges.end() - 1, v) - (edges.begin() + 1));
    const double w = std::exp(-(v - shift));
    wsum[i] += w;
    sw.add(w);
    sw2.add(w * w);
  }
  const double n = static_cast<double>(tv.size());
  std::vector<double> obs(n_bins), expected(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) {
    obs[i] = n * wsum[i] / sw.value();
    expected[i] = n * detail::bin_integral(integrand, edges[i], edges[i + 1]) / z;
  }
  GofResult g = detail::pearson(obs, expected, kMinExpectedCount, 1);
  g.effective_size = sw.value() * sw.value() / sw2.value();
  return g;
}

// ---------------------------------------------------------------------------
// Classical limit

struct ClassicalParams {
  double lambda = 0.0;
  double mu = 0.0;
};

/// lambda = m^2 t, mu = (m / t)(x - y)^2
inline ClassicalParams classical_params(double m, double t, double y, double x) {
  detail::require(t > 0.0, ErrorCode::NonPositiveScale, "t must be positive");
  return {m * m * t, (m / t) * (x - y) * (x - y)};
}

/// Classical oscillator path with x(0) = y, x(t) = x.
inline double classical_solution_ho(double omega, double t, double y, double x, double tau) {
  detail::require(omega > 0.0 && t > 0.0, ErrorCode::NonPositiveScale, "omega and t must be positive");
  detail::require(tau >= 0.0 && tau <= t, ErrorCode::InvalidArgument, "tau must lie in [0, t]");
  return (y * std::sinh(omega * (t - tau)) + x * std::sinh(omega * tau)) / std::sinh(omega * t);
}

struct TrajectoryReport {
  /// Physical positions at tau_i = t i / N_p, flat with `dim` components each.
  std::vector<double> positions;
  int dim = 1;
  double t = 0.0;
  std::size_t loop_index = 0;
  /// W_max / sum W
  double weight_share = 0.0;
  /// ln W of the dominant loop.
  double ln_weight = 0.0;
  ClassicalParams params;
};

/// The loop with the largest weight, scaled to physical positions.
template <LoopSource Ensemble>
TrajectoryReport dominant_trajectory(const Ensemble& ensemble, const LoopWeights& weights, std::span<const double> y,
                                     std::span<const double> x, double t, double m) {
  detail::require(!weights.tv.empty() && weights.tv.size() == ensemble.size(), ErrorCode::EmptyEnsemble,
                  "weights must cover a non-empty ensemble");
  const auto best = static_cast<std::size_t>(std::min_element(weights.tv.begin(), weights.tv.end()) - weights.tv.begin());
  const double top = -weights.tv[best];
  CompensatedSum total;
  for (double tv : weights.tv) total.add(std::exp(-tv - top));
  TrajectoryReport r;
  UnitLoop scratch;
  scale_path_into(ensemble.loop(best, scratch), y, x, t, m, r.positions);
  r.dim = ensemble.spec().dim;
  r.t = t;
  r.loop_index = best;
  r.weight_share = 1.0 / total.value();
  r.ln_weight = top;
  if (r.dim == 1) r.params = classical_params(m, t, y[0], x[0]);
  return r;
}

struct AveragedTrajectory {
  std::vector<double> tau;
  std::vector<double> mean;
  std::vector<double> standard_error;
  /// Normalized weight of each simulation's dominant trajectory.
  std::vector<double> weights;
};

/// Weight-averaged dominant trajectory over simulations (d = 1).
///
/// Each report enters with weight W / sum W. The per-point error is
/// sqrt(n/(n-1) * sum w_k^2 (x_k - mean)^2).
inline AveragedTrajectory weighted_average_trajectory(std::span<const TrajectoryReport> reports) {
  detail::require(reports.size() >= 2, ErrorCode::TooFewSamples, "need at least 2 simulations");
  const std::size_t len = reports.front().positions.size();
  for (const auto& r : reports)
    detail::require(r.dim == 1 && r.positions.size() == len, ErrorCode::DimensionMismatch,
                    "reports must be one-dimensional paths of equal length");
  double top = -std::numeric_limits<double>::infinity();
  for (const auto& r : reports) top = std::max(top, r.ln_weight);
  AveragedTrajectory out;
  CompensatedSum total;
  for (const auto& r : reports) {
    out.weights.push_back(std::exp(r.ln_weight - top));
    total.add(out.weights.back());
  }
  for (double& w : out.weights) w /= total.value();
  const double n = static_cast<double>(reports.size());
  out.tau.resize(len);
  out.mean.assign(len, 0.0);
  out.standard_error.assign(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    out.tau[i] = reports.front().t * static_cast<double>(i) / static_cast<double>(len - 1);
    CompensatedSum m;
    for (std::size_t k = 0; k < reports.size(); ++k) m.add(out.weights[k] * reports[k].positions[i]);
    out.mean[i] = m.value();
    CompensatedSum v;
    for (std::size_t k = 0; k < reports.size(); ++k) {
      const double d = reports[k].positions[i] - out.mean[i];
      v.add(out.weights[k] * out.weights[k] * d * d);
    }
    out.standard_error[i] = std::sqrt(v.value() * n / (n - 1.0));
  }
  return out;
}

}  // namespace wlmc

#endif  // WLMC_ANALYSIS_HPP
