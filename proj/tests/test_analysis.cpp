#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "wlmc/analysis.hpp"
#include "wlmc/analytic.hpp"

using namespace wlmc;

namespace {

KernelSeries line_series(double slope, double intercept, double t0, double t1, double dt, double sem = 0.0) {
  KernelSeries s;
  for (double t = t0; t <= t1 + 1e-9; t += dt) s.rows.push_back({t, intercept + slope * t, sem, std::nullopt});
  return s;
}

template <class F>
void expect_error(ErrorCode code, F&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(FitEnergy, ExactOnNoiselessLine) {
  const KernelSeries s = line_series(-0.5, 1.25, 1, 30, 1);
  const EnergyFit f = fit_energy(s, {5, 19});
  EXPECT_NEAR(f.energy, 0.5, 1e-13);
  EXPECT_NEAR(f.intercept, 1.25, 1e-12);
  EXPECT_LT(f.residual_rms, 1e-12);
  EXPECT_EQ(f.n_points, 15u);
  EXPECT_TRUE(f.spectral);
  EXPECT_EQ(f.window.t_lo, 5.0);
}

TEST(FitEnergy, BoundAboveFitsMinusLnKButReportsSameEnergy) {
  const KernelSeries s = line_series(0.5, -3.0, 1, 20, 1, 0.01);
  const EnergyFit below = fit_energy(s, {9, 20}, EnergySign::BoundBelow);
  const EnergyFit above = fit_energy(s, {9, 20}, EnergySign::BoundAbove);
  EXPECT_NEAR(below.energy, -0.5, 1e-12);
  EXPECT_NEAR(above.energy, -0.5, 1e-12);
  EXPECT_NEAR(above.intercept, -3.0, 1e-12);
  EXPECT_NEAR(above.uncertainty, below.uncertainty, 1e-15);
}

TEST(FitEnergy, WeightedSlopeErrorMatchesFormula) {
  // Slope error for equal sigma: sigma / sqrt(sum (t - tbar)^2).
  const KernelSeries s = line_series(-1.0, 0.0, 1, 5, 1, 0.1);
  EXPECT_NEAR(fit_energy(s, {1, 5}).uncertainty, 0.1 / std::sqrt(10.0), 1e-14);
}

TEST(FitEnergy, WeightsFavourPreciseRows) {
  KernelSeries s = line_series(-1.0, 0.0, 1, 6, 1, 0.001);
  s.rows[5].ln_value += 1.0;
  s.rows[5].sem_ln = 100.0;
  EXPECT_NEAR(fit_energy(s, {1, 6}).energy, 1.0, 1e-4);
}

TEST(FitEnergy, DegenerateWindows) {
  const KernelSeries s = line_series(-1.0, 0.0, 1, 10, 1);
  expect_error(ErrorCode::DegenerateWindow, [&] { fit_energy(s, {5, 5}); });
  expect_error(ErrorCode::DegenerateWindow, [&] { fit_energy(s, {5, 6}); });
  expect_error(ErrorCode::DegenerateWindow, [&] { fit_energy(s, {20, 30}); });
  KernelSeries bad = s;
  std::swap(bad.rows[2], bad.rows[3]);
  expect_error(ErrorCode::InvalidArgument, [&] { fit_energy(bad, {1, 10}); });
}

TEST(FitEnergy, CurvatureFlaggedNonSpectral) {
  KernelSeries s;
  for (double t = 1; t <= 10; t += 1) s.rows.push_back({t, -0.5 * t + 0.3 * std::log(t), 0.001, std::nullopt});
  EXPECT_FALSE(fit_energy(s, {1, 10}).spectral);
}

TEST(FirstExcited, TwoLevelSyntheticKernel) {
  // K = psi0(x) psi0(y) e^{-E0 t} + psi1(x) psi1(y) e^{-E1 t} with psi0 even, psi1 odd.
  const double e0 = 0.5, e1 = 1.5, x = 2.0, y = 1.0;
  auto psi0 = [](double z) { return std::exp(-z * z / 2); };
  auto psi1 = [](double z) { return z * std::exp(-z * z / 2); };
  KernelSeries proj;
  for (double t = 1.0; t <= 6.0; t += 0.25) {
    auto k = [&](double yy) { return psi0(x) * psi0(yy) * std::exp(-e0 * t) + psi1(x) * psi1(yy) * std::exp(-e1 * t); };
    proj.rows.push_back({t, std::log(0.5 * (k(y) - k(-y))), 0.0, std::nullopt});
  }
  const EnergyFit f = first_excited_energy(proj, {2.25, 5});
  EXPECT_NEAR(f.energy, e1, 1e-12);
  EXPECT_TRUE(f.spectral);
}

TEST(FirstExcited, FreeProjectionIsNonSpectral) {
  const std::vector<double> x{2.0}, y{1.0}, my{-1.0};
  KernelSeries proj;
  for (double t = 1.0; t <= 20.0; t += 1.0)
    proj.rows.push_back({t, std::log(0.5 * (kernel_free(y, x, t, 1.0) - kernel_free(my, x, t, 1.0))), 0.0, std::nullopt});
  EXPECT_FALSE(first_excited_energy(proj, {2, 20}).spectral);
}

TEST(FirstExcited, NonPositiveProjectionInsideWindow) {
  KernelSeries s = line_series(-1.5, 0.0, 1, 6, 0.5, 0.01);
  s.rows[4].ln_value = std::numeric_limits<double>::quiet_NaN();
  expect_error(ErrorCode::NonPositiveProjection, [&] { first_excited_energy(s, {1, 6}); });
  EXPECT_NO_THROW(first_excited_energy(s, {3.5, 6}));
}

TEST(DetectWindow, PerfectLineGivesFullRange) {
  const KernelSeries s = line_series(-0.5, 0.0, 1, 40, 1, 0.01);
  const Window w = detect_window(s, 5, 3.0);
  EXPECT_EQ(w.t_lo, 1.0);
  EXPECT_EQ(w.t_hi, 40.0);
}

TEST(DetectWindow, BendAfterThirty) {
  KernelSeries s = line_series(-0.5, 0.0, 1, 45, 1, 0.01);
  for (auto& r : s.rows)
    if (r.t > 30) r.ln_value -= 0.2 * (r.t - 30);
  const Window w = detect_window(s, 5, 3.0);
  EXPECT_LE(w.t_hi, 30.0);
  EXPECT_GE(w.t_hi - w.t_lo, 20.0);
}

TEST(DetectWindow, AnalyticDisagreementExcludesRows) {
  KernelSeries s = line_series(-0.5, 0.0, 1, 20, 1, 0.01);
  for (auto& r : s.rows) r.ln_analytic = r.ln_value;
  s.rows[14].ln_analytic = s.rows[14].ln_value + 0.1;
  const Window w = detect_window(s, 5, 3.0);
  EXPECT_EQ(w.t_lo, 1.0);
  EXPECT_EQ(w.t_hi, 14.0);
}

TEST(DetectWindow, NotFound) {
  KernelSeries s;
  for (double t = 1; t <= 8; t += 1) s.rows.push_back({t, (int(t) % 2 ? 1.0 : -1.0), 0.01, std::nullopt});
  expect_error(ErrorCode::WindowNotFound, [&] { detect_window(s, 4, 3.0); });
  expect_error(ErrorCode::WindowNotFound, [&] { detect_window(line_series(-1, 0, 1, 3, 1), 5, 3.0); });
}

TEST(Skyscrapers, MonotoneSeriesIsQuiet) {
  EXPECT_TRUE(detect_skyscrapers(line_series(0.5, 0.0, 1, 100, 1, 0.01)).empty());
  // Noisy but monotone within errors.
  std::mt19937_64 g(5);
  std::normal_distribution<double> n(0.0, 0.01);
  KernelSeries s = line_series(0.5, 0.0, 1, 100, 1, 0.01);
  for (auto& r : s.rows) r.ln_value += n(g);
  EXPECT_TRUE(detect_skyscrapers(s).empty());
}

TEST(Skyscrapers, BumpIsDetected) {
  KernelSeries s = line_series(0.5, 0.0, 1, 100, 1, 0.01);
  s.rows[77].ln_value += 2.0;
  const auto hits = detect_skyscrapers(s);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(s.rows[hits[0]].t, 78.0);
  // A bump buried in its own error bar is not a skyscraper.
  s.rows[77].sem_ln = 1.0;
  EXPECT_TRUE(detect_skyscrapers(s).empty());
}

TEST(ChiSquare, PerfectAgreement) {
  const std::vector<double> e{10, 20, 30}, o{10, 20, 30};
  const GofResult g = detail::pearson(o, e, 5.0, 1);
  EXPECT_EQ(g.chi2, 0.0);
  EXPECT_NEAR(g.p_value, 1.0, 1e-15);
  EXPECT_EQ(g.dof, 2u);
}

TEST(ChiSquare, MergesLowExpectationBins) {
  const std::vector<double> e{1, 2, 3, 10, 1, 1};
  const auto groups = detail::merge_bins(e, 5.0);
  ASSERT_EQ(groups.size(), 2u);
  EXPECT_EQ(groups[0], std::make_pair(std::size_t{0}, std::size_t{3}));
  EXPECT_EQ(groups[1], std::make_pair(std::size_t{3}, std::size_t{6}));
}

TEST(ChiSquare, NullDistributionIsUniform) {
  // Exponential(1) samples against their own density.
  std::mt19937_64 g(123);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> ps;
  std::vector<double> xs(100'000);
  for (int rep = 0; rep < 100; ++rep) {
    for (double& x : xs) x = ex(g);
    const Histogram h = make_histogram(xs, 60);
    const double lo = h.bin_edges.front(), hi = h.bin_edges.back();
    // Truncated to the observed range so the expected counts sum to N.
    const double z = std::exp(-lo) - std::exp(-hi);
    ps.push_back(chi_square_gof(h, [&](double x) { return std::exp(-x) / z; }).p_value);
  }
  std::nth_element(ps.begin(), ps.begin() + 50, ps.end());
  EXPECT_GE(ps[50], 0.3);
  EXPECT_LE(ps[50], 0.7);
}

TEST(ChiSquare, WrongDensityRejected) {
  std::mt19937_64 g(1);
  std::exponential_distribution<double> ex(1.1);
  std::vector<double> xs(100'000);
  for (double& x : xs) x = ex(g);
  const Histogram h = make_histogram(xs, 60);
  const double z = std::exp(-h.bin_edges.front()) - std::exp(-h.bin_edges.back());
  EXPECT_LT(chi_square_gof(h, [&](double x) { return std::exp(-x) / z; }).p_value, 1e-10);
}

TEST(ChiSquare, TooFewCounts) {
  const Histogram h = make_histogram(std::vector<double>{1, 2, 3}, 2);
  expect_error(ErrorCode::InsufficientCounts, [&] { chi_square_gof(h, [](double) { return 0.5; }); });
}

TEST(ChiSquareTail, LogSurvivalPastUnderflow) {
  // mpmath log10 of the regularized upper incomplete gamma Q(dof/2, chi2/2)
  EXPECT_NEAR(detail::log10_chi2_sf(2000.0, 99), -350.710812862583, 1e-3);
  EXPECT_NEAR(detail::log10_chi2_sf(356543.0, 99), -77229.5890383431, 1e-3);
  EXPECT_NEAR(detail::log10_chi2_sf(5000.0, 3), -1083.98469286162, 1e-3);
  EXPECT_NEAR(detail::log10_chi2_sf(120.0, 99),
              std::log10(boost::math::cdf(boost::math::complement(boost::math::chi_squared(99.0), 120.0))), 1e-12);
}

TEST(IntegrandChiSquare, ReweightedExponentialSamples) {
  // Samples from 4 e^{-4v}; weighted by e^{-v} the target is proportional to e^{-5v}.
  std::mt19937_64 g(77);
  std::exponential_distribution<double> ex(4.0);
  std::vector<double> ps;
  for (int rep = 0; rep < 21; ++rep) {
    std::vector<double> v(20'000);
    for (double& x : v) x = ex(g);
    const GofResult r = integrand_chi_square_gof(v, [](double x) { return 4.0 * std::exp(-4.0 * x); }, 50);
    ps.push_back(r.p_value);
    // Kish size for this weight law is N (4/5)^2 / (4/6) = 0.96 N.
    EXPECT_NEAR(r.effective_size / 20'000.0, 0.96, 0.02);
  }
  std::nth_element(ps.begin(), ps.begin() + 10, ps.end());
  EXPECT_GT(ps[10], 0.1);
  std::vector<double> v(20'000);
  for (double& x : v) x = ex(g);
  EXPECT_LT(integrand_chi_square_gof(v, [](double x) { return 3.0 * std::exp(-3.0 * x); }, 50).p_value, 1e-6);
}

TEST(IntegrandChiSquare, SamplesMissingTheLowRegionAreRejected) {
  // Every sample above 1, where the model keeps only e^{-5} of the integrand mass.
  std::mt19937_64 g(78);
  std::exponential_distribution<double> ex(4.0);
  std::vector<double> v(20'000);
  for (double& x : v) x = 1.0 + ex(g);
  const GofResult r = integrand_chi_square_gof(v, [](double x) { return 4.0 * std::exp(-4.0 * x); }, 50);
  EXPECT_EQ(r.dof, 49u);
  EXPECT_LT(r.p_value, 1e-12);
  EXPECT_LT(r.log10_p_value, -12.0);
}

TEST(Classical, Params) {
  const auto a = classical_params(30, 10, 1, -1);
  EXPECT_DOUBLE_EQ(a.mu, 12.0);
  EXPECT_DOUBLE_EQ(a.lambda, 9000.0);
  EXPECT_DOUBLE_EQ(classical_params(10, 90, 0, 0).lambda, 9000.0);
  EXPECT_EQ(classical_params(10, 90, 0.5, 0.5).mu, 0.0);
}

TEST(Classical, SolutionBoundaryAndClosedForm) {
  const double w = 1.0, t = 10.0;
  EXPECT_DOUBLE_EQ(classical_solution_ho(w, t, 1.0, -1.0, 0.0), 1.0);
  EXPECT_NEAR(classical_solution_ho(w, t, 1.0, -1.0, t), -1.0, 1e-15);
  for (double tau : {0.5, 2.0, 5.0, 7.5}) {
    const double closed = std::cosh(w * tau) - (1.0 + std::cosh(w * t)) / std::sinh(w * t) * std::sinh(w * tau);
    EXPECT_NEAR(classical_solution_ho(w, t, 1.0, -1.0, tau), closed, 1e-12);
  }
  EXPECT_NEAR(classical_solution_ho(1e-4, 1.0, 0.3, 0.9, 0.25), 0.3 + 0.6 * 0.25, 1e-6);
}

TEST(Classical, EulerLagrangeResidual) {
  const double w = 1.3, t = 4.0, h = 1e-3;
  for (double tau : {0.5, 1.7, 3.1}) {
    auto x = [&](double s) { return classical_solution_ho(w, t, 0.4, -1.2, s); };
    const double acc = (x(tau + h) - 2 * x(tau) + x(tau - h)) / (h * h);
    EXPECT_NEAR(acc - w * w * x(tau), 0.0, 1e-6);
  }
}

TEST(DominantTrajectory, FreeShareIsOneOverN) {
  const LazyEnsemble e({LoopAlgorithm::YLoop, 250, 20, 1, 2});
  const std::vector<double> y{1.0}, x{-1.0};
  const LoopWeights w = loop_weights(Free{}, y, x, 10.0, 30.0, e, Pointwise{});
  const TrajectoryReport r = dominant_trajectory(e, w, y, x, 10.0, 30.0);
  EXPECT_DOUBLE_EQ(r.weight_share, 1.0 / 250.0);
  EXPECT_EQ(r.positions.front(), 1.0);
  EXPECT_EQ(r.positions.back(), -1.0);
  EXPECT_DOUBLE_EQ(r.params.mu, 12.0);
}

TEST(DominantTrajectory, HarmonicShareExceedsUniform) {
  const LazyEnsemble e({LoopAlgorithm::YLoop, 500, 100, 1, 2});
  const std::vector<double> y{1.0}, x{-1.0};
  const LoopWeights w = loop_weights(Harmonic{30, 1}, y, x, 10.0, 30.0, e, Pointwise{});
  const TrajectoryReport r = dominant_trajectory(e, w, y, x, 10.0, 30.0);
  EXPECT_GT(r.weight_share, 1.0 / 500.0);
  EXPECT_LE(r.weight_share, 1.0);
  EXPECT_EQ(r.ln_weight, -*std::min_element(w.tv.begin(), w.tv.end()));
  // The dominant loop has the largest weight by construction.
  UnitLoop scratch;
  std::vector<double> path;
  scale_path_into(e.loop(r.loop_index, scratch), y, x, 10.0, 30.0, path);
  EXPECT_EQ(path, r.positions);
}

TEST(WeightedAverage, EqualWeightsGivePlainMean) {
  std::vector<TrajectoryReport> rs(3);
  const double vals[3][3] = {{1, 0.2, -1}, {1, 0.5, -1}, {1, -0.1, -1}};
  for (int k = 0; k < 3; ++k) {
    rs[k].positions.assign(vals[k], vals[k] + 3);
    rs[k].t = 2.0;
    rs[k].ln_weight = -7.0;
  }
  const AveragedTrajectory a = weighted_average_trajectory(rs);
  EXPECT_NEAR(a.mean[1], 0.2, 1e-15);
  EXPECT_EQ(a.tau[1], 1.0);
  // sqrt(n/(n-1) sum w^2 d^2) with w = 1/3 equals the standard error of the mean.
  const double d2 = 0.0 + 0.09 + 0.09;
  EXPECT_NEAR(a.standard_error[1], std::sqrt(1.5 * d2 / 9.0), 1e-15);
  EXPECT_EQ(a.standard_error[0], 0.0);
}

TEST(WeightedAverage, HeavierSimulationDominates) {
  std::vector<TrajectoryReport> rs(2);
  rs[0].positions = {0, 1, 0};
  rs[1].positions = {0, -1, 0};
  rs[0].ln_weight = 800.0;
  rs[1].ln_weight = 800.0 - std::log(3.0);
  const AveragedTrajectory a = weighted_average_trajectory(rs);
  EXPECT_NEAR(a.weights[0], 0.75, 1e-12);
  EXPECT_NEAR(a.mean[1], 0.5, 1e-12);
  expect_error(ErrorCode::TooFewSamples, [&] { weighted_average_trajectory(std::span(rs).first(1)); });
}
