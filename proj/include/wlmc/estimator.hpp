/**
 * @file estimator.hpp
 * @brief Monte Carlo estimates of the Euclidean kernel
 *        K(x,y;t) = K_0(x,y;t) <exp(-t v)> over unit-loop ensembles.
 */
#ifndef WLMC_ESTIMATOR_HPP
#define WLMC_ESTIMATOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "wlmc/errors.hpp"
#include "wlmc/loops.hpp"
#include "wlmc/parallel.hpp"
#include "wlmc/potentials.hpp"
#include "wlmc/statistics.hpp"

namespace wlmc {

struct Provenance {
  LoopAlgorithm algorithm = LoopAlgorithm::VLoop;
  std::uint64_t seed = 0;
  std::size_t n_loops = 0;
  std::size_t n_points = 0;
};

struct KernelEstimate {
  double value = 0.0;
  double ln_value = 0.0;
  double sem = 0.0;
  /// First-order error of ln_value, sem / value.
  double sem_ln = 0.0;
  double mean_W = 0.0;
  double ln_mean_W = 0.0;
  double t = 0.0;
  std::vector<double> y;
  std::vector<double> x;
  std::size_t n_ensembles = 1;
  Provenance provenance;
  std::size_t n_singular_events = 0;
};

/// ln K_0 = (d/2) ln(m / 2 pi t) - m |x - y|^2 / 2t
inline double ln_free_normalization(std::span<const double> y, std::span<const double> x, double t, double m) {
  double r2 = 0.0;
  for (std::size_t c = 0; c < y.size(); ++c) r2 += (x[c] - y[c]) * (x[c] - y[c]);
  return 0.5 * static_cast<double>(y.size()) * std::log(m / (2.0 * std::numbers::pi * t)) - m * r2 / (2.0 * t);
}

namespace detail {

inline void check_scales(double t, double m) {
  require(t > 0.0 && m > 0.0 && std::isfinite(t) && std::isfinite(m), ErrorCode::NonPositiveScale,
          "t and m must be positive");
}

inline void check_endpoints(std::span<const double> y, std::span<const double> x, int dim) {
  require(y.size() == static_cast<std::size_t>(dim) && x.size() == y.size(), ErrorCode::DimensionMismatch,
          "endpoint dimension differs from the ensemble dimension");
}

inline Provenance provenance_of(const EnsembleSpec& s) { return {s.algorithm, s.seed, s.n_loops, s.n_points}; }

}  // namespace detail

/// W = exp(-t v) for one unit loop scaled to the endpoints y, x.
inline double weight(const PotentialSpec& potential, const UnitLoop& loop, std::span<const double> y,
                     std::span<const double> x, double t, double m, const LineIntegralMethod& method) {
  detail::check_scales(t, m);
  detail::check_endpoints(y, x, loop.dim());
  std::vector<double> path;
  scale_path_into(loop, y, x, t, m, path);
  return std::exp(-t * line_integral(potential, path, loop.dim(), method).v);
}

/// Per-loop exponents t v_k (so W_k = exp(-t v_k)) in loop-index order.
struct LoopWeights {
  std::vector<double> tv;
  std::size_t n_singular_events = 0;
};

template <LoopSource Ensemble>
LoopWeights loop_weights(const PotentialSpec& potential, std::span<const double> y, std::span<const double> x,
                         double t, double m, const Ensemble& ensemble, const LineIntegralMethod& method,
                         Execution exec = {}, double fluctuation_sign = 1.0) {
  detail::check_scales(t, m);
  detail::require(ensemble.size() > 0, ErrorCode::EmptyEnsemble, "empty loop ensemble");
  const int dim = ensemble.spec().dim;
  detail::check_endpoints(y, x, dim);
  check_method(potential, method, dim);

  LoopWeights out;
  out.tv.resize(ensemble.size());
  std::vector<std::size_t> singular(ensemble.size());
  parallel_blocks(ensemble.size(), exec, [&](std::size_t, std::size_t begin, std::size_t end) {
    UnitLoop scratch;
    std::vector<double> path;
    for (std::size_t k = begin; k < end; ++k) {
      scale_path_into(ensemble.loop(k, scratch), y, x, t, m, path, fluctuation_sign);
      const LineIntegralResult r = line_integral(potential, path, dim, method);
      out.tv[k] = t * r.v;
      singular[k] = r.n_singular_events;
    }
  });
  for (std::size_t s : singular) out.n_singular_events += s;
  return out;
}

/// Kernel estimate from per-loop exponents.
inline KernelEstimate kernel_from_weights(const LoopWeights& w, std::span<const double> y, std::span<const double> x,
                                          double t, double m) {
  std::vector<double> exponents(w.tv.size());
  for (std::size_t k = 0; k < w.tv.size(); ++k) exponents[k] = -w.tv[k];
  const LogMeanResult lm = log_mean_exp(exponents);
  const double ln_k0 = ln_free_normalization(y, x, t, m);
  KernelEstimate e;
  e.t = t;
  e.y.assign(y.begin(), y.end());
  e.x.assign(x.begin(), x.end());
  e.mean_W = lm.mean;
  e.ln_mean_W = lm.ln_mean;
  e.ln_value = ln_k0 + lm.ln_mean;
  e.value = std::exp(ln_k0) * lm.mean;
  e.sem = std::exp(ln_k0) * lm.sem;
  e.sem_ln = lm.rel_sem;
  e.n_singular_events = w.n_singular_events;
  return e;
}

template <LoopSource Ensemble>
KernelEstimate estimate_kernel(const PotentialSpec& potential, std::span<const double> y, std::span<const double> x,
                               double t, double m, const Ensemble& ensemble, const LineIntegralMethod& method,
                               Execution exec = {}) {
  const LoopWeights w = loop_weights(potential, y, x, t, m, ensemble, method, exec);
  KernelEstimate e = kernel_from_weights(w, y, x, t, m);
  e.provenance = detail::provenance_of(ensemble.spec());
  return e;
}

/// Grand mean over n_ensembles fresh ensembles; member j uses seed derive_seed(base_seed, {j}).
/// The error is the spread of the per-ensemble means over sqrt(n_ensembles).
inline KernelEstimate estimate_kernel_multi(const PotentialSpec& potential, std::span<const double> y,
                                            std::span<const double> x, double t, double m,
                                            const EnsembleSpec& config, std::size_t n_ensembles,
                                            std::uint64_t base_seed, const LineIntegralMethod& method,
                                            Execution exec = {}) {
  detail::require(n_ensembles >= 2, ErrorCode::TooFewSamples, "need at least 2 ensembles");
  std::vector<double> means(n_ensembles);
  std::size_t singular = 0;
  for (std::size_t j = 0; j < n_ensembles; ++j) {
    EnsembleSpec s = config;
    s.seed = derive_seed(base_seed, {j});
    const LoopWeights w = loop_weights(potential, y, x, t, m, LazyEnsemble(s), method, exec);
    means[j] = kernel_from_weights(w, y, x, t, m).mean_W;
    singular += w.n_singular_events;
  }
  const double k0 = std::exp(ln_free_normalization(y, x, t, m));
  KernelEstimate e;
  e.t = t;
  e.y.assign(y.begin(), y.end());
  e.x.assign(x.begin(), x.end());
  e.mean_W = mean(means);
  e.ln_mean_W = std::log(e.mean_W);
  e.value = k0 * e.mean_W;
  e.ln_value = std::log(e.value);
  e.sem = k0 * sem(means);
  e.sem_ln = e.sem / e.value;
  e.n_ensembles = n_ensembles;
  e.provenance = detail::provenance_of(config);
  e.provenance.seed = base_seed;
  e.n_singular_events = singular;
  return e;
}

/// How the loop for the reflected endpoint -y is paired with the loop for y.
enum class ParityPairing {
  /// Same fluctuation q on both paths; the estimator vanishes per loop at y = 0.
  Shared,
  /// Fluctuation -q on the reflected path.
  Mirrored,
};

/// Estimate of (1/2)[K(x,y;t) - K(x,-y;t)] from paired paths.
///
/// `value` may be non-positive when the two kernels cancel to within noise;
/// ln_value is NaN in that case.
template <LoopSource Ensemble>
KernelEstimate estimate_parity_projected(const PotentialSpec& potential, std::span<const double> y,
                                         std::span<const double> x, double t, double m, const Ensemble& ensemble,
                                         const LineIntegralMethod& method, Execution exec = {},
                                         ParityPairing pairing = ParityPairing::Shared) {
  detail::require(is_parity_even(potential), ErrorCode::ParityOdd,
                  "parity projection requires a parity-even potential");
  std::vector<double> minus_y(y.begin(), y.end());
  for (double& c : minus_y) c = -c;
  const double sign = pairing == ParityPairing::Shared ? 1.0 : -1.0;
  const LoopWeights plus = loop_weights(potential, y, x, t, m, ensemble, method, exec);
  const LoopWeights minus = loop_weights(potential, minus_y, x, t, m, ensemble, method, exec, sign);
  const double k_plus = std::exp(ln_free_normalization(y, x, t, m));
  const double k_minus = std::exp(ln_free_normalization(minus_y, x, t, m));

  std::vector<double> samples(plus.tv.size());
  for (std::size_t k = 0; k < samples.size(); ++k)
    samples[k] = 0.5 * (k_plus * std::exp(-plus.tv[k]) - k_minus * std::exp(-minus.tv[k]));

  KernelEstimate e;
  e.t = t;
  e.y.assign(y.begin(), y.end());
  e.x.assign(x.begin(), x.end());
  e.value = mean(samples);
  e.sem = samples.size() >= 2 ? sem(samples) : 0.0;
  e.ln_value = e.value > 0.0 ? std::log(e.value) : std::numeric_limits<double>::quiet_NaN();
  e.sem_ln = e.value > 0.0 ? e.sem / e.value : std::numeric_limits<double>::infinity();
  e.mean_W = e.value / std::exp(ln_free_normalization(y, x, t, m));
  e.ln_mean_W = std::log(e.mean_W);
  e.provenance = detail::provenance_of(ensemble.spec());
  e.n_singular_events = plus.n_singular_events + minus.n_singular_events;
  return e;
}

// ---------------------------------------------------------------------------
// Histograms

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  /// Mean of the histogrammed samples, summed in sample order.
  double sample_mean = 0.0;

  std::size_t n_bins() const noexcept { return counts.size(); }
  double width(std::size_t i) const { return bin_edges[i + 1] - bin_edges[i]; }
  double center(std::size_t i) const { return 0.5 * (bin_edges[i] + bin_edges[i + 1]); }
  double density(std::size_t i) const {
    return static_cast<double>(counts[i]) / (static_cast<double>(total) * width(i));
  }
};

/// Equal-width bins over [min, max] of the samples; empty bins are kept.
/// A constant sample gets a unit-width range centred on its value.
inline Histogram make_histogram(std::span<const double> samples, std::size_t n_bins) {
  detail::require(!samples.empty(), ErrorCode::EmptyEnsemble, "no samples to histogram");
  detail::require(n_bins >= 2, ErrorCode::InvalidArgument, "n_bins must be >= 2");
  auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h;
  h.bin_edges.resize(n_bins + 1);
  const double w = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t i = 0; i <= n_bins; ++i) h.bin_edges[i] = lo + w * static_cast<double>(i);
  h.bin_edges.back() = hi;
  h.counts.assign(n_bins, 0);
  for (double s : samples) {
    auto i = static_cast<std::size_t>((s - lo) / w);
    if (i >= n_bins) i = n_bins - 1;
    ++h.counts[i];
  }
  h.total = samples.size();
  h.sample_mean = mean(samples);
  return h;
}

/// Histogram of the dimensionless exponent t v over the ensemble.
template <LoopSource Ensemble>
Histogram v_histogram(const PotentialSpec& potential, std::span<const double> y, std::span<const double> x,
                      double t, double m, const Ensemble& ensemble, const LineIntegralMethod& method,
                      std::size_t n_bins, Execution exec = {}) {
  return make_histogram(loop_weights(potential, y, x, t, m, ensemble, method, exec).tv, n_bins);
}

/// Histogram of W = exp(-t v) over the ensemble.
template <LoopSource Ensemble>
Histogram w_histogram(const PotentialSpec& potential, std::span<const double> y, std::span<const double> x,
                      double t, double m, const Ensemble& ensemble, const LineIntegralMethod& method,
                      std::size_t n_bins, Execution exec = {}) {
  std::vector<double> w = loop_weights(potential, y, x, t, m, ensemble, method, exec).tv;
  for (double& s : w) s = std::exp(-s);
  return make_histogram(w, n_bins);
}

}  // namespace wlmc

#endif  // WLMC_ESTIMATOR_HPP
