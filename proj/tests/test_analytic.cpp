#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wlmc/analytic.hpp"

using namespace wlmc;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kPi = std::numbers::pi;

template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 20, tol);
}

// Laplace transform of the oscillator P(v): <e^{-s t v}> = sqrt(w / sinh w), w = sqrt(s) omega t.
// Evaluated at s = -i z through ln(w / sinh w) = ln w - w - ln(1 - e^{-2w}) + ln 2, which keeps
// every logarithm on its principal branch for Re w > 0.
std::complex<double> characteristic(double z, double wt) {
  if (z == 0.0) return 1.0;
  const std::complex<double> w = std::sqrt(std::complex<double>(0.0, -z)) * wt;
  const std::complex<double> ln = std::log(w) - w - std::log(1.0 - std::exp(-2.0 * w)) + std::numbers::ln2;
  return std::exp(0.5 * ln);
}

// P(v) = (1/pi) Re \int_0^inf dz e^{-i z v} E[e^{i z v}], by brute-force quadrature.
double pv_fourier_oracle(double v, double wt) {
  const double z_max = 2.0 * std::pow(90.0 / wt, 2);
  const double step = std::min(1.0, 1.0 / v);
  double sum = 0.0;
  for (double a = 0.0; a < z_max; a += step) {
    sum += gauss_kronrod<double, 61>::integrate(
        [&](double z) { return std::real(std::exp(std::complex<double>(0.0, -z * v)) * characteristic(z, wt)); }, a,
        a + step, 0, 0.0);
  }
  return sum / kPi;
}

// Delta-well kernel from its heat-kernel representation:
// K_0(x - y) + m g \int_0^inf du e^{m g u} K_0(|x| + |y| + u).
double delta_oracle(double y, double x, double t, double m, double g) {
  auto k0 = [&](double r) { return std::sqrt(m / (2.0 * kPi * t)) * std::exp(-m * r * r / (2.0 * t)); };
  const double a = std::abs(x) + std::abs(y);
  const double tail = gauss_kronrod<double, 61>::integrate(
      [&](double u) {
        return std::sqrt(m / (2.0 * kPi * t)) * std::exp(m * g * u - m * (a + u) * (a + u) / (2.0 * t));
      },
      0.0, std::numeric_limits<double>::infinity(), 25, 1e-13);
  return k0(x - y) + m * g * tail;
}

double ho_ln_ratio(double wt) { return 0.5 * (std::log(wt) - std::log(std::sinh(wt))); }

const std::vector<double> kZero{0.0};

}  // namespace

TEST(KernelFree, Examples) {
  EXPECT_NEAR(kernel_free(kZero, kZero, 1.0, 1.0), 0.398942, 1e-6);
  const double y = 0.3;
  const double norm = integrate(
      [&](double x) { return kernel_free(std::vector<double>{y}, std::vector<double>{x}, 2.0, 1.5); }, -30.0, 30.0);
  EXPECT_NEAR(norm, 1.0, 1e-12);
  const std::vector<double> y3{0.1, -0.2, 0.5}, x3{1.0, 0.4, -0.7};
  double product = 1.0;
  for (int c = 0; c < 3; ++c) product *= kernel_free(std::vector<double>{y3[c]}, std::vector<double>{x3[c]}, 0.7, 2.0);
  EXPECT_NEAR(kernel_free(y3, x3, 0.7, 2.0), product, 1e-14 * product);
}

TEST(KernelHo, FreeLimit) {
  const std::vector<double> y{-0.2}, x{0.3};
  const double ho = kernel_ho(y, x, 1.0, 1.0, 1e-4);
  const double free = kernel_free(y, x, 1.0, 1.0);
  EXPECT_NEAR(ho / free, 1.0, 1e-8);
}

TEST(KernelHo, ClosedFormValueAndLargeTime) {
  EXPECT_NEAR(-ln_kernel_ho(kZero, kZero, 8.0, 1.0, 1.0), 0.5 * std::log(2.0 * kPi * std::sinh(8.0)), 1e-12);
  EXPECT_NEAR(-ln_kernel_ho(kZero, kZero, 8.0, 1.0, 1.0), 4.5722, 2e-4);
  // Finite in log space where sinh overflows.
  const double big = ln_kernel_ho(kZero, kZero, 1000.0, 1.0, 1.0);
  EXPECT_NEAR(big, -500.0 - 0.5 * std::log(kPi), 1e-9);
}

TEST(KernelHo, SpectralSlope) {
  const double h = 1e-3;
  for (int d : {1, 2, 3}) {
    const std::vector<double> o(d, 0.0);
    const double slope =
        -(ln_kernel_ho(o, o, 40.0 + h, 1.0, 1.0) - ln_kernel_ho(o, o, 40.0 - h, 1.0, 1.0)) / (2.0 * h);
    EXPECT_NEAR(slope, 0.5 * d, 1e-6);
  }
}

TEST(KernelHo, OffDiagonalAgainstMehler) {
  // Mehler form with cosh written out, at moderate omega t where it is safe.
  const std::vector<double> y{0.4, -0.1}, x{-0.3, 0.8};
  const double m = 1.7, w = 0.9, t = 2.3;
  const double s = std::sinh(w * t), c = std::cosh(w * t);
  const double q = (0.16 + 0.01 + 0.09 + 0.64) * c - 2.0 * (0.4 * -0.3 + -0.1 * 0.8);
  const double mehler = (m * w / (2.0 * kPi * s)) * std::exp(-0.5 * m * w / s * q);
  EXPECT_NEAR(kernel_ho(y, x, t, m, w), mehler, 1e-13 * mehler);
}

TEST(Energies, Examples) {
  EXPECT_DOUBLE_EQ(energy_ho(0, 3, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(energy_ho(1, 1, 1.0), 1.5);
  EXPECT_DOUBLE_EQ(energy_pt(0, 2, 1.0, 1.0), -2.0);
  EXPECT_DOUBLE_EQ(energy_pt(0, 1, 1.0, 1.0), -0.5);
  EXPECT_DOUBLE_EQ(energy_delta(1.0, 1.5), -1.125);
  EXPECT_DOUBLE_EQ(energy_coulomb(1, 1.0, 1.0), -0.5);
  EXPECT_DOUBLE_EQ(energy_coulomb(2, 1.0, 1.0), -0.125);
}

TEST(Energies, OutOfRangeLevels) {
  for (auto f : {+[] { energy_ho(-1, 1, 1.0); }, +[] { energy_pt(2, 2, 1.0, 1.0); }, +[] { energy_coulomb(0, 1.0, 1.0); }}) {
    try {
      f();
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::LevelOutOfRange);
    }
  }
}

TEST(KernelPt, BoundTermAtOriginNuOne) {
  for (double t : {5.0, 20.0}) {
    const double free = std::sqrt(1.0 / (2.0 * kPi * t));
    EXPECT_NEAR(kernel_pt_asymptotic(0.0, 0.0, t, 1.0, 1.0, 1) - free, 0.5 * std::exp(0.5 * t),
                1e-12 * std::exp(0.5 * t));
  }
}

TEST(KernelPt, MatchesNormalizedWavefunctions) {
  // nu = 1: psi_0 = sqrt(a/2) sech(ax).
  // nu = 2: psi_0 = sqrt(3a/4) sech^2(ax), psi_1 = sqrt(3a/2) tanh(ax) sech(ax).
  const double a = 1.3, m = 0.8, t = 3.0, y = 0.4, x = -0.9;
  const double free = std::sqrt(m / (2.0 * kPi * t)) * std::exp(-m * (x - y) * (x - y) / (2.0 * t));
  auto sech = [](double z) { return 1.0 / std::cosh(z); };
  {
    const double psi = a / 2.0 * sech(a * y) * sech(a * x);
    const double e0 = energy_pt(0, 1, a, m);
    EXPECT_NEAR(kernel_pt_asymptotic(y, x, t, m, a, 1), psi * std::exp(-e0 * t) + free, 1e-12);
  }
  {
    const double p0 = 0.75 * a * std::pow(sech(a * y) * sech(a * x), 2);
    const double p1 = 1.5 * a * std::tanh(a * y) * sech(a * y) * std::tanh(a * x) * sech(a * x);
    const double expected = p0 * std::exp(-energy_pt(0, 2, a, m) * t) + p1 * std::exp(-energy_pt(1, 2, a, m) * t) + free;
    EXPECT_NEAR(kernel_pt_asymptotic(y, x, t, m, a, 2), expected, 1e-12 * expected);
  }
}

TEST(KernelPt, SlopeAndFarField) {
  const double h = 1e-3;
  const double slope = (std::log(kernel_pt_asymptotic(0, 0, 30 + h, 1, 1, 1)) -
                        std::log(kernel_pt_asymptotic(0, 0, 30 - h, 1, 1, 1))) / (2 * h);
  EXPECT_NEAR(slope, 0.5, 1e-6);
  const double free = std::sqrt(1.0 / (2.0 * kPi * 2.0)) * std::exp(-0.25);
  EXPECT_NEAR(kernel_pt_asymptotic(40.0, 41.0, 2.0, 1.0, 1.0, 2) / free, 1.0, 1e-12);
}

TEST(KernelPt, UnsupportedNu) {
  try {
    kernel_pt_asymptotic(0, 0, 1, 1, 1, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsupportedParameter);
  }
}

TEST(KernelDelta, MatchesHeatKernelOracle) {
  for (double t : {0.05, 0.5, 2.0, 8.0})
    for (auto [y, x] : {std::pair{0.0, 0.0}, {0.3, -0.2}, {1.0, 0.5}, {-0.7, -1.1}}) {
      const double oracle = delta_oracle(y, x, t, 1.0, 1.5);
      EXPECT_NEAR(kernel_delta(y, x, t, 1.0, 1.5), oracle, 1e-8 * oracle) << t << " " << y << " " << x;
    }
  const double oracle = delta_oracle(0.2, 0.1, 1.5, 2.5, 0.7);
  EXPECT_NEAR(kernel_delta(0.2, 0.1, 1.5, 2.5, 0.7), oracle, 1e-8 * oracle);
}

TEST(KernelDelta, Limits) {
  const double free = std::sqrt(1.0 / (2.0 * kPi * 1.2)) * std::exp(-0.25 / 2.4);
  EXPECT_NEAR(kernel_delta(0.2, -0.3, 1.2, 1.0, 1e-9) / free, 1.0, 1e-8);
  EXPECT_NEAR(std::log(kernel_delta(0, 0, 40.0, 1.0, 1.5)) - 1.125 * 40.0, std::log(1.5), 1e-9);
  // Short times: the continuum dominates and K approaches K_0.
  EXPECT_NEAR(kernel_delta(0, 0, 1e-4, 1.0, 1.5) / std::sqrt(1.0 / (2.0 * kPi * 1e-4)), 1.0, 0.02);
}

TEST(PvSeries, SupportAndSmallV) {
  EXPECT_EQ(pv_ho_series(0.0, 10.0, 1.0), 0.0);
  EXPECT_EQ(pv_ho_series(-1.0, 10.0, 1.0), 0.0);
  // Suppressed like exp(-(omega t)^2 / 16 v).
  EXPECT_LT(pv_ho_series(0.01, 10.0, 1.0), 1e-250);
  EXPECT_LT(pv_ho_series(0.05, 10.0, 1.0), 1e-50);
  EXPECT_GE(pv_ho_series(0.05, 10.0, 1.0), 0.0);
}

TEST(PvSeries, MatchesFourierInversion) {
  for (double wt : {5.0, 10.0})
    for (double x : {0.03, 0.06, 0.0833, 0.15, 0.3}) {
      const double v = x * wt * wt;
      const double oracle = pv_fourier_oracle(v, wt);
      EXPECT_NEAR(pv_ho_series(v, wt, 1.0), oracle, 1e-7 * std::max(oracle, 1e-3)) << wt << " " << v;
    }
}

TEST(PvSeries, NormalizationAndInverseTransform) {
  for (double wt : {5.0, 10.0}) {
    const double hi = 4.0 * wt * wt;
    const double total = integrate([&](double v) { return pv_ho_series(v, wt, 1.0); }, 0.0, hi, 1e-10);
    EXPECT_NEAR(total, 1.0, 1e-3);
    const double laplace = integrate([&](double v) { return pv_ho_series(v, wt, 1.0) * std::exp(-v); }, 0.0, hi, 1e-10);
    const double k = std::exp(ln_kernel_free(kZero, kZero, wt, 1.0)) * laplace;
    const double exact = kernel_ho(kZero, kZero, wt, 1.0, 1.0);
    EXPECT_NEAR(k / exact, 1.0, 1e-3) << wt;
    // Other transform points: E[e^{-s v}] = sqrt(sqrt(s) wt / sinh(sqrt(s) wt)).
    for (double s : {0.25, 2.0}) {
      const double l = integrate([&](double v) { return pv_ho_series(v, wt, 1.0) * std::exp(-s * v); }, 0.0, hi, 1e-10);
      EXPECT_NEAR(std::log(l), ho_ln_ratio(std::sqrt(s) * wt), 1e-3);
    }
  }
}

TEST(PvSeries, NonNegativeOverTheSupport) {
  // Up to 3 (omega t)^2, far beyond any sampled t v (mean (omega t)^2 / 12), the truncated
  // series is non-negative. Further out the n <= 50 truncation leaves residuals of either
  // sign; they stay below 1e-15 of the peak until about 4.5 (omega t)^2.
  for (double wt : {1.0, 5.0, 10.0, 20.0, 45.0, 50.0}) {
    const double peak = pv_ho_series(wt * wt / 16.0, wt, 1.0);
    for (int k = 0; k <= 400; ++k) {
      const double v = wt * wt * std::pow(10.0, -3.0 + 3.477 * k / 400.0);
      EXPECT_GE(pv_ho_series(v, wt, 1.0), 0.0) << wt << " " << v;
    }
    for (double x : {3.5, 4.0, 4.4}) EXPECT_LT(std::abs(pv_ho_series(x * wt * wt, wt, 1.0)), 1e-15 * peak);
  }
}

TEST(PvScale, IdentityAndScalingLaw) {
  auto at1 = [](double v) { return pv_ho_series(v, 1.0, 1.0); };
  EXPECT_EQ(pv_scale(0.07, 1.0, at1), at1(0.07));
  for (double t : {2.0, 10.0, 45.0})
    for (double x : {0.02, 0.08, 0.2, 0.5}) {
      const double v = x * t * t;
      const double direct = pv_ho_series(v, t, 1.0);
      EXPECT_NEAR(pv_scale(v, t, at1), direct, 1e-10 * direct) << t << " " << v;
    }
  const double t = 10.0;
  const double scaled = integrate([&](double v) { return pv_scale(v, t, at1); }, 0.0, 4.0 * t * t, 1e-10);
  EXPECT_NEAR(scaled, 1.0, 1e-3);
}

TEST(PvTail, DiagnosticSlopeMinusOne) {
  const double wt = 10.0;
  std::vector<double> lx, ly;
  for (int k = 0; k <= 40; ++k) {
    const double v = wt * wt * std::pow(10.0, -2.0 + k / 40.0);
    lx.push_back(std::log(v));
    ly.push_back(std::log(tail_diagnostic(v, wt, 1.0, pv_ho_series(v, wt, 1.0))));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= lx.size();
  my /= ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  EXPECT_NEAR(sxy / sxx, -1.0, 0.05);
}

TEST(PvTail, SeriesApproachesTail) {
  for (double wt : {2.0, 10.0, 30.0}) {
    double prev_gap = INFINITY;
    for (double x : {0.01, 0.004, 0.002}) {
      const double v = x * wt * wt;
      const double gap = std::abs(pv_ho_series(v, wt, 1.0) / pv_tail_ho(v, wt, 1.0) - 1.0);
      EXPECT_LT(gap, prev_gap);
      prev_gap = gap;
    }
    EXPECT_LT(prev_gap, 0.01) << wt;
  }
}

TEST(PvTail, ScalingLaw) {
  for (double v : {0.5, 2.0, 7.0}) {
    const double t = 3.0;
    EXPECT_NEAR(pv_tail_ho(4.0 * v, 2.0 * t, 1.0), pv_tail_ho(v, t, 1.0) / 4.0, 1e-14 * pv_tail_ho(v, t, 1.0));
  }
}

TEST(WDensity, ChangeOfVariables) {
  const double wt = 10.0;
  auto pv = [wt](double v) { return pv_ho_series(v, wt, 1.0); };
  const auto pw = w_density_from_v(pv);
  EXPECT_EQ(pw(1.0), pv(0.0));
  // Integrate over W on [e^{-400}, 1), split at W = e^{-v} so each piece is resolved.
  std::vector<double> cuts;
  for (int v = 0; v < 20; ++v) cuts.push_back(v);
  for (int v = 20; v <= 400; v += 5) cuts.push_back(v);
  double norm = 0.0, mean_w = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = std::exp(-cuts[k + 1]), b = std::exp(-cuts[k]);
    norm += gauss_kronrod<double, 61>::integrate(pw, a, b, 3, 1e-9);
    mean_w += gauss_kronrod<double, 61>::integrate([&](double w) { return w * pw(w); }, a, b, 3, 1e-9);
  }
  EXPECT_NEAR(norm, 1.0, 1e-3);
  EXPECT_NEAR(mean_w, std::exp(ho_ln_ratio(wt)), 1e-3 * std::exp(ho_ln_ratio(wt)));
  try {
    pw(0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
  }
}
