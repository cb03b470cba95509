/**
 * @file analytic.hpp
 * @brief Reference kernels, level energies and the harmonic-oscillator
 *        distribution of the path-averaged potential.
 */
#ifndef WLMC_ANALYTIC_HPP
#define WLMC_ANALYTIC_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "wlmc/errors.hpp"

namespace wlmc {

namespace detail {

inline double squared_distance(std::span<const double> y, std::span<const double> x) {
  require(y.size() == x.size() && !y.empty(), ErrorCode::DimensionMismatch, "endpoints differ in dimension");
  double r2 = 0.0;
  for (std::size_t c = 0; c < y.size(); ++c) r2 += (x[c] - y[c]) * (x[c] - y[c]);
  return r2;
}

/// ln sinh(z) for z > 0 without overflow.
inline double log_sinh(double z) {
  if (z < 1.0) return std::log(std::sinh(z));
  return z + std::log1p(-std::exp(-2.0 * z)) - std::numbers::ln2;
}

}  // namespace detail

inline double ln_kernel_free(std::span<const double> y, std::span<const double> x, double t, double m) {
  detail::require(t > 0.0 && m > 0.0, ErrorCode::NonPositiveScale, "t and m must be positive");
  const double d = static_cast<double>(y.size());
  return 0.5 * d * std::log(m / (2.0 * std::numbers::pi * t)) - m * detail::squared_distance(y, x) / (2.0 * t);
}

/// (m / 2 pi t)^{d/2} exp(-m |x - y|^2 / 2t)
inline double kernel_free(std::span<const double> y, std::span<const double> x, double t, double m) {
  return std::exp(ln_kernel_free(y, x, t, m));
}

/// ln of the harmonic-oscillator kernel, finite for any omega t.
inline double ln_kernel_ho(std::span<const double> y, std::span<const double> x, double t, double m, double omega) {
  detail::require(t > 0.0 && m > 0.0 && omega > 0.0, ErrorCode::NonPositiveScale, "t, m, omega must be positive");
  detail::squared_distance(y, x);
  const double wt = omega * t;
  const double d = static_cast<double>(y.size());
  double yy = 0.0, xx = 0.0, xy = 0.0;
  for (std::size_t c = 0; c < y.size(); ++c) {
    yy += y[c] * y[c];
    xx += x[c] * x[c];
    xy += x[c] * y[c];
  }
  const double coth = 1.0 / std::tanh(wt);
  const double csch = std::exp(-detail::log_sinh(wt));
  return 0.5 * d * (std::log(m * omega / (2.0 * std::numbers::pi)) - detail::log_sinh(wt)) -
         0.5 * m * omega * ((yy + xx) * coth - 2.0 * xy * csch);
}

inline double kernel_ho(std::span<const double> y, std::span<const double> x, double t, double m, double omega) {
  return std::exp(ln_kernel_ho(y, x, t, m, omega));
}

// ---------------------------------------------------------------------------
// Level energies

inline double energy_ho(int n, int d, double omega) {
  detail::require(n >= 0 && d >= 1, ErrorCode::LevelOutOfRange, "harmonic level index must be >= 0");
  return (n + 0.5 * d) * omega;
}

inline double energy_pt(int n, int nu, double a, double m) {
  detail::require(n >= 0 && n < nu, ErrorCode::LevelOutOfRange, "poschl-teller level must satisfy 0 <= n < nu");
  return -(a * a / (2.0 * m)) * (nu - n) * (nu - n);
}

inline double energy_delta(double m, double g) { return -0.5 * m * g * g; }

inline double energy_coulomb(int n, double m, double alpha) {
  detail::require(n >= 1, ErrorCode::LevelOutOfRange, "coulomb principal number must be >= 1");
  return -m * alpha * alpha / (2.0 * n * n);
}

// ---------------------------------------------------------------------------
// Poschl-Teller

namespace detail {

/// P_nu^{n - nu}(z) for nu <= 2.
inline double legendre_pt(int nu, int n, double z) {
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  if (nu == 1) return 0.5 * s;
  if (n == 0) return (1.0 - z * z) / 8.0;
  return 0.5 * z * s;
}

inline double factorial_small(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Large-t kernel of the Poschl-Teller well: bound-state sum plus the free kernel.
inline double kernel_pt_asymptotic(double y, double x, double t, double m, double a, int nu) {
  detail::require(nu == 1 || nu == 2, ErrorCode::UnsupportedParameter, "poschl-teller reference needs nu in {1, 2}");
  detail::require(t > 0.0 && m > 0.0 && a > 0.0, ErrorCode::NonPositiveScale, "t, m, a must be positive");
  const double zy = std::tanh(a * y);
  const double zx = std::tanh(a * x);
  double bound = 0.0;
  for (int n = 0; n < nu; ++n) {
    const double k = nu - n;
    bound += a * k * detail::factorial_small(2 * nu - n) / detail::factorial_small(n) *
             std::exp(a * a / (2.0 * m) * k * k * t) * detail::legendre_pt(nu, n, zy) * detail::legendre_pt(nu, n, zx);
  }
  const double free = std::sqrt(m / (2.0 * std::numbers::pi * t)) * std::exp(-m * (x - y) * (x - y) / (2.0 * t));
  return bound + free;
}

// ---------------------------------------------------------------------------
// Delta well

/// Kernel of V = -g delta(x): bound state exactly, continuum by adaptive quadrature over k.
inline double kernel_delta(double y, double x, double t, double m, double g) {
  detail::require(t > 0.0 && m > 0.0 && g > 0.0, ErrorCode::NonPositiveScale, "t, m, g must be positive");
  const double a = std::abs(x) + std::abs(y);
  const double bound = m * g * std::exp(0.5 * m * g * g * t - m * g * a);
  const double k0 = std::sqrt(m / (2.0 * std::numbers::pi * t)) * std::exp(-m * (x - y) * (x - y) / (2.0 * t));
  // (1/pi) \int_0^inf dk e^{-k^2 t/2m} Re[g e^{ika} / (g + ik/m)]
  auto f = [=](double k) {
    const double km = k / m;
    return std::exp(-k * k * t / (2.0 * m)) * g * (g * std::cos(k * a) + km * std::sin(k * a)) / (g * g + km * km);
  };
  const double k_max = std::sqrt(2.0 * m * 50.0 / t);
  // The 1/(g^2 + k^2/m^2) factor has width m g; split there so a weak well stays resolved.
  std::vector<double> cuts{0.0};
  for (double c = m * g; c < k_max; c *= 10.0) cuts.push_back(c);
  cuts.push_back(k_max);
  double sum = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double e = 0.0;
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 10, 1e-11, &e);
    err += e;
  }
  const double integral = sum / std::numbers::pi;
  detail::require(err / std::numbers::pi <= 1e-8 * (std::abs(integral) + k0), ErrorCode::QuadratureFailure,
                  "delta-kernel continuum integral did not converge");
  return bound + k0 - integral;
}

// ---------------------------------------------------------------------------
// Distribution of the path-averaged potential for the oscillator (y = x = 0)

/// Density of the dimensionless exponent t v, truncated to even n <= n_max.
inline double pv_ho_series(double v, double t, double omega, int n_max = 50) {
  detail::require(t > 0.0 && omega > 0.0 && n_max >= 0, ErrorCode::InvalidArgument,
                  "pv series needs t, omega > 0 and n_max >= 0");
  if (!(v > 0.0)) return 0.0;
  const double wt = omega * t;
  double sum = 0.0;
  for (int n = 0; n <= n_max; n += 2) {
    const double c = (n + 0.5) * wt;
    const double vn = c * c / (8.0 * v);
    // Re K_nu(-x) = cos(pi nu) K_nu(x) on the upper-half-plane continuation.
    const double k14 = boost::math::cyl_bessel_k(0.25, vn);
    const double k54 = boost::math::cyl_bessel_k(1.25, vn);
    if (k14 == 0.0 && k54 == 0.0) continue;
    const double ln_coeff = std::lgamma(n + 1.0) - 2.0 * std::lgamma(0.5 * n + 1.0) - (n + 0.5) * std::numbers::ln2 +
                            1.5 * std::log(vn) - vn - 2.5 * std::log(c);
    sum += std::exp(ln_coeff) * 0.5 * std::numbers::sqrt2 * ((vn - 0.75) * k14 + vn * k54);
  }
  return 64.0 * std::sqrt(wt / (2.0 * std::numbers::pi * std::numbers::pi)) * sum;
}

/// t^-2 P(v / t^2 | t = 1)
template <class Density>
double pv_scale(double v, double t, Density&& density_at_t1) {
  detail::require(t > 0.0, ErrorCode::NonPositiveScale, "t must be positive");
  return density_at_t1(v / (t * t)) / (t * t);
}

/// Small-v asymptote of pv_ho_series: the n = 0 term with K_nu(z) ~ sqrt(pi/2z) e^{-z},
/// (omega t)^2 / (4 sqrt(2 pi) v^2) exp(-omega^2 t^2 / 16 v).
///
/// The often quoted prefactor 8 omega t / pi^2 is off by the factor
/// pi^2 omega t / (32 sqrt(2 pi)) and breaks the t^-2 scaling law.
inline double pv_tail_ho(double v, double t, double omega) {
  detail::require(v > 0.0 && t > 0.0 && omega > 0.0, ErrorCode::InvalidArgument, "tail form needs v, t, omega > 0");
  const double wt = omega * t;
  return wt * wt / (4.0 * std::sqrt(2.0 * std::numbers::pi) * v * v) * std::exp(-wt * wt / (16.0 * v));
}

/// -ln P + ln(8 omega t / pi^2) - 2 ln v. In the tail this is omega^2 t^2 / 16 v
/// plus a constant, so its log is close to linear in ln v with slope -1.
inline double tail_diagnostic(double v, double t, double omega, double density) {
  detail::require(v > 0.0 && density > 0.0, ErrorCode::InvalidArgument, "diagnostic needs v > 0 and P > 0");
  return -std::log(density) + std::log(8.0 * omega * t / (std::numbers::pi * std::numbers::pi)) - 2.0 * std::log(v);
}

/// P_W(W) = P_v(-ln W) / W
inline std::function<double(double)> w_density_from_v(std::function<double(double)> density_v) {
  return [density_v = std::move(density_v)](double w) {
    detail::require(w > 0.0, ErrorCode::InvalidArgument, "W must be positive");
    return density_v(-std::log(w)) / w;
  };
}

}  // namespace wlmc

#endif  // WLMC_ANALYTIC_HPP
