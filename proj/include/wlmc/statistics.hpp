/**
 * @file statistics.hpp
 * @brief Order-fixed reductions and error estimates for Monte Carlo samples.
 */
#ifndef WLMC_STATISTICS_HPP
#define WLMC_STATISTICS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "wlmc/errors.hpp"
#include "wlmc/rng.hpp"

namespace wlmc {

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline double mean(std::span<const double> xs) {
  detail::require(!xs.empty(), ErrorCode::EmptyEnsemble, "mean of an empty sample");
  return compensated_sum(xs) / static_cast<double>(xs.size());
}

/// Standard error of the mean: sqrt(sum (x - mean)^2 / (N (N - 1))).
inline double sem(std::span<const double> xs) {
  detail::require(xs.size() >= 2, ErrorCode::TooFewSamples, "sem needs at least 2 samples");
  const double mu = mean(xs);
  CompensatedSum ss;
  for (double x : xs) ss.add((x - mu) * (x - mu));
  const double n = static_cast<double>(xs.size());
  return std::sqrt(ss.value() / (n * (n - 1.0)));
}

/// Sample standard deviation with the N - 1 denominator.
inline double stddev(std::span<const double> xs) {
  return sem(xs) * std::sqrt(static_cast<double>(xs.size()));
}

struct Jackknife {};
struct Bootstrap {
  std::size_t n_boot = 1000;
  std::uint64_t seed = 0;
};
using ResampleMethod = std::variant<Jackknife, Bootstrap>;

/// Jackknife standard error of the mean.
inline double jackknife_error(std::span<const double> xs) {
  detail::require(xs.size() >= 10, ErrorCode::TooFewSamples, "resampling needs at least 10 samples");
  const double n = static_cast<double>(xs.size());
  const double total = compensated_sum(xs);
  std::vector<double> loo(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) loo[i] = (total - xs[i]) / (n - 1.0);
  const double mu = mean(loo);
  CompensatedSum ss;
  for (double v : loo) ss.add((v - mu) * (v - mu));
  return std::sqrt((n - 1.0) / n * ss.value());
}

/// Bootstrap standard error of the mean from n_boot resamples.
inline double bootstrap_error(std::span<const double> xs, std::size_t n_boot, std::uint64_t seed) {
  detail::require(xs.size() >= 10, ErrorCode::TooFewSamples, "resampling needs at least 10 samples");
  detail::require(n_boot >= 100, ErrorCode::TooFewSamples, "bootstrap needs n_boot >= 100");
  std::mt19937_64 engine(derive_seed(seed, {0xB007u}));
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  std::vector<double> means(n_boot);
  for (double& m : means) {
    CompensatedSum s;
    for (std::size_t j = 0; j < xs.size(); ++j) s.add(xs[pick(engine)]);
    m = s.value() / static_cast<double>(xs.size());
  }
  return stddev(means);
}

inline double resample_error(std::span<const double> xs, const ResampleMethod& method) {
  if (const auto* b = std::get_if<Bootstrap>(&method)) return bootstrap_error(xs, b->n_boot, b->seed);
  return jackknife_error(xs);
}

/// Mean and standard error of exp(e_k) from exponents e_k, kept in log form.
///
/// Values are rescaled by exp(max e) only when an exponent leaves [-700, 700],
/// so ordinary runs sum the plain weights.
struct LogMeanResult {
  double ln_mean = 0.0;
  /// sem / mean
  double rel_sem = 0.0;
  /// May be 0 or inf after rescaling; ln_mean stays accurate.
  double mean = 0.0;
  double sem = 0.0;
};

inline LogMeanResult log_mean_exp(std::span<const double> exponents) {
  detail::require(!exponents.empty(), ErrorCode::EmptyEnsemble, "no samples");
  const auto [lo, hi] = std::minmax_element(exponents.begin(), exponents.end());
  const bool rescale = *hi > 700.0 || *lo < -700.0;
  const double shift = rescale ? *hi : 0.0;
  const double n = static_cast<double>(exponents.size());
  CompensatedSum s;
  for (double e : exponents) s.add(std::exp(e - shift));
  const double m = s.value() / n;
  // The spread is taken relative to the largest term, so squares cannot overflow.
  double rel = 0.0;
  if (exponents.size() >= 2) {
    CompensatedSum sh;
    for (double e : exponents) sh.add(std::exp(e - *hi));
    const double mh = sh.value() / n;
    CompensatedSum ss;
    for (double e : exponents) {
      const double d = std::exp(e - *hi) - mh;
      ss.add(d * d);
    }
    rel = std::sqrt(ss.value() / (n * (n - 1.0))) / mh;
  }
  LogMeanResult r;
  r.ln_mean = shift + std::log(m);
  r.rel_sem = rel;
  r.mean = rescale ? std::exp(r.ln_mean) : m;
  r.sem = rel == 0.0 ? 0.0 : r.mean * r.rel_sem;
  return r;
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic Kolmogorov
/// distribution and Stephens' small-sample correction.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  detail::require(!a.empty() && !b.empty(), ErrorCode::TooFewSamples, "KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double en = std::sqrt(na * nb / (na + nb));
  const double lambda = (en + 0.12 + 0.11 / en) * d;
  if (lambda < 0.27) return {d, 1.0};
  double q = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return {d, std::clamp(q, 0.0, 1.0)};
}

}  // namespace wlmc

#endif  // WLMC_STATISTICS_HPP
