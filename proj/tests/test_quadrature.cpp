#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qrpinn/errors.h"
#include "qrpinn/lowdisc.h"
#include "qrpinn/pool_sampler.h"
#include "qrpinn/quadrature.h"

using namespace qrpinn;

TEST(Integrands, ExactValuesAndPointEvaluation) {
  const Integrand s = f_sin(3);
  const Integrand e = f_exp(4);
  EXPECT_EQ(*s.exact_integral, 0.0);
  EXPECT_NEAR(*e.exact_integral, std::pow(1.0 - std::exp(-1.0), 4), 1e-15);
  const std::vector<double> x = {0.25, 0.5, 0.125};
  EXPECT_NEAR(s.eval(x), 1.0 + 0.0 + std::sin(std::numbers::pi / 4), 1e-15);
  const std::vector<double> y = {0.1, 0.2, 0.3, 0.4};
  EXPECT_NEAR(e.eval(y), std::exp(-1.0), 1e-15);
  EXPECT_EQ(make_integrand("f_sin", 2).name, make_integrand("sin", 2).name);
  EXPECT_THROW(make_integrand("f_cos", 2), InvalidArgument);
}

TEST(Estimate, ConstantIntegrandIsExactForAnyPointSet) {
  const Integrand c{"const", 2, [](std::span<const double>) { return 3.5; }, 3.5, ""};
  EXPECT_EQ(estimate(c, halton(17, {SequenceKind::Halton, 2, 0, 0})), 3.5);
  EXPECT_EQ(estimate(c, uniform_random(5, {SequenceKind::UniformRandom, 2, 1, 0})), 3.5);
  EXPECT_THROW(estimate(c, halton(5, {SequenceKind::Halton, 3, 0, 0})), InvalidArgument);
}

TEST(Estimate, MidpointGridIntegratesLinearExactly) {
  std::vector<double> x;
  for (int i = 0; i < 10; ++i) x.push_back((i + 0.5) / 10.0);
  const PointSet ps({SequenceKind::UniformRandom, 1, 0, 0}, 1, x);
  const Integrand lin{"lin", 1, [](std::span<const double> p) { return p[0]; }, 0.5, ""};
  EXPECT_NEAR(estimate(lin, ps), 0.5, 1e-15);
}

TEST(FitLogLog, PowerLawAndSentinels) {
  const std::vector<std::size_t> ns = {16, 64, 256, 1024};
  std::vector<double> err;
  for (auto n : ns) err.push_back(0.3 * std::pow(static_cast<double>(n), -0.5));
  const auto fit = fit_log_log(ns, err);
  EXPECT_NEAR(fit.slope, -0.5, 1e-12);
  EXPECT_NEAR(std::exp(fit.intercept), 0.3, 1e-12);

  EXPECT_TRUE(std::isnan(fit_log_log(std::vector<std::size_t>{16}, std::vector<double>{0.1}).slope));
  // Errors under the floor carry no rate information.
  const std::vector<double> mostly_zero = {0.1, 1e-17, 0.0, 1e-16};
  EXPECT_TRUE(std::isnan(fit_log_log(ns, mostly_zero).slope));
}

TEST(ConvergenceStudy, MonteCarloHalfRateAndSobolFaster) {
  ConvergenceStudyConfig cfg;
  cfg.n_grid = power_of_two_grid(4, 12);
  const std::vector<QuadMethod> methods = {QuadMethod::MC, QuadMethod::QmcSobol, QuadMethod::QmcHalton};
  const auto curves = convergence_study(f_exp(2), methods, cfg);
  ASSERT_EQ(curves.size(), 3u);
  EXPECT_GE(curves[0].fitted_slope, -0.65);
  EXPECT_LE(curves[0].fitted_slope, -0.35);
  EXPECT_LE(curves[1].fitted_slope, -0.8);
  EXPECT_LE(curves[2].fitted_slope, -0.8);
  EXPECT_LT(curves[1].rows.back().mean_abs_err, curves[0].rows.back().mean_abs_err);
  for (const auto& row : curves[1].rows) EXPECT_EQ(row.std_err, 0.0);  // one deterministic run
}

TEST(ConvergenceStudy, ZeroIntegrandHasNoSlope) {
  const Integrand zero{"zero", 2, [](std::span<const double>) { return 0.0; }, 0.0, ""};
  ConvergenceStudyConfig cfg;
  cfg.n_grid = {16, 32, 64};
  cfg.seeds = 3;
  const std::vector<QuadMethod> methods = {QuadMethod::MC, QuadMethod::RqmcSobol};
  for (const auto& c : convergence_study(zero, methods, cfg)) {
    EXPECT_TRUE(std::isnan(c.fitted_slope));
    for (const auto& r : c.rows) EXPECT_EQ(r.mean_abs_err, 0.0);
  }
}

TEST(ConvergenceStudy, NeedsExactIntegralAndIsDeterministic) {
  const Integrand no_exact{"x", 1, [](std::span<const double> p) { return p[0]; }, std::nullopt, ""};
  ConvergenceStudyConfig cfg;
  cfg.n_grid = {16, 32};
  const std::vector<QuadMethod> mc = {QuadMethod::MC};
  EXPECT_THROW(convergence_study(no_exact, mc, cfg), Unsupported);

  const std::vector<QuadMethod> all = {QuadMethod::MC, QuadMethod::RqmcHalton, QuadMethod::RqmcSobol};
  const auto a = convergence_study(f_sin(3), all, cfg);
  const auto b = convergence_study(f_sin(3), all, cfg);
  for (std::size_t m = 0; m < a.size(); ++m) {
    for (std::size_t r = 0; r < a[m].rows.size(); ++r) EXPECT_EQ(a[m].rows[r].mean_abs_err, b[m].rows[r].mean_abs_err);
  }
}

TEST(Rqmc, FullPoolBatchEqualsQmcEstimate) {
  for (std::size_t d : {1u, 2u, 5u}) {
    const PointSet pool_points = sobol(512, {SequenceKind::Sobol, d, 0, 0});
    const Pool pool(pool_points, 1.0);
    const PointSet batch = draw_uniform_batch(pool, pool.size(), 12345);
    EXPECT_EQ(estimate(f_exp(d), batch), estimate(f_exp(d), pool_points));
  }
}

TEST(QuadMethods, NamesRoundTrip) {
  for (auto m : {QuadMethod::MC, QuadMethod::QmcHalton, QuadMethod::QmcSobol, QuadMethod::RqmcHalton,
                 QuadMethod::RqmcSobol}) {
    EXPECT_EQ(parse_quad_method(to_string(m)), m);
  }
  EXPECT_THROW(parse_quad_method("lattice"), InvalidArgument);
  EXPECT_EQ(power_of_two_grid(2, 4), (std::vector<std::size_t>{4, 8, 16}));
}
