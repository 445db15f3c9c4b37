#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "qrpinn/discrepancy.h"
#include "qrpinn/errors.h"
#include "qrpinn/lowdisc.h"
#include "qrpinn/rng.h"

using namespace qrpinn;

namespace {

// sup over y of |#{x < y}/N - y| and |#{x <= y}/N - y|, scanning every y that can be
// extremal: each point value (both one-sided counts) and y = 1.
double brute_force_1d(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double best = 0.0;
  std::vector<double> ys(x);
  ys.push_back(1.0);
  for (double y : ys) {
    double open = 0, closed = 0;
    for (double v : x) {
      open += v < y;
      closed += v <= y;
    }
    best = std::max({best, std::abs(open / n - y), std::abs(closed / n - y)});
  }
  return best;
}

// Every corner built from coordinate values or 1, open and closed counts, O(N^(d+1)).
double brute_force_nd(const PointSet& ps) {
  const std::size_t n = ps.size(), d = ps.dim();
  std::vector<std::vector<double>> grid(d);
  for (std::size_t j = 0; j < d; ++j) {
    grid[j] = ps.column(j);
    grid[j].push_back(1.0);
  }
  std::vector<std::size_t> pick(d, 0);
  double best = 0.0;
  for (;;) {
    std::vector<double> u(d);
    double vol = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      u[j] = grid[j][pick[j]];
      vol *= u[j];
    }
    double open = 0, closed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool in_open = true, in_closed = true;
      for (std::size_t j = 0; j < d; ++j) {
        in_open = in_open && ps(i, j) < u[j];
        in_closed = in_closed && ps(i, j) <= u[j];
      }
      open += in_open;
      closed += in_closed;
    }
    best = std::max({best, vol - open / static_cast<double>(n), closed / static_cast<double>(n) - vol});
    std::size_t j = 0;
    while (j < d && ++pick[j] == grid[j].size()) pick[j++] = 0;
    if (j == d) break;
  }
  return best;
}

std::vector<double> random_points(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform();
  return x;
}

}  // namespace

TEST(StarDiscrepancy1D, MatchesBruteForceOnRandomSets) {
  Rng sizes(99);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 1 + sizes.below(256);
    const auto x = random_points(n, 1000 + t);
    EXPECT_NEAR(star_discrepancy_1d(x).value, brute_force_1d(x), 1e-12) << "n = " << n;
  }
}

TEST(StarDiscrepancy1D, KnownValues) {
  // Centred grid (2n-1)/(2N) attains the minimum 1/(2N).
  std::vector<double> centred;
  for (int i = 1; i <= 8; ++i) centred.push_back((2.0 * i - 1.0) / 16.0);
  EXPECT_NEAR(star_discrepancy_1d(centred).value, 1.0 / 16.0, 1e-15);
  // van der Corput prefix of length 2^m has D* = 1/2^m.
  const PointSet vdc = halton(64, {SequenceKind::Halton, 1, 0, 0});
  EXPECT_NEAR(star_discrepancy_1d(vdc.coords()).value, 1.0 / 64.0, 1e-15);
  EXPECT_NEAR(star_discrepancy_1d(std::vector<double>{0.5}).value, 0.5, 1e-15);
  EXPECT_THROW(star_discrepancy_1d(std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(star_discrepancy_1d(std::vector<double>{1.5}), InvalidArgument);
}

TEST(StarDiscrepancyND, DimensionOneAgreesWithExact1D) {
  for (int t = 0; t < 20; ++t) {
    const auto x = random_points(5 + 10 * t, 7 + t);
    const PointSet ps({SequenceKind::UniformRandom, 1, 0, 0}, 1, x);
    EXPECT_NEAR(star_discrepancy_nd(ps).value, star_discrepancy_1d(x).value, 1e-12);
  }
}

TEST(StarDiscrepancyND, MatchesBruteForceInTwoAndThreeDimensions) {
  for (std::size_t d : {2u, 3u}) {
    for (int t = 0; t < 8; ++t) {
      const std::size_t n = 3 + 4 * t;
      const PointSet ps = uniform_random(n, {SequenceKind::UniformRandom, d, 50u + t, 0});
      EXPECT_NEAR(star_discrepancy_nd(ps).value, brute_force_nd(ps), 1e-12) << d << " " << n;
    }
  }
  const PointSet h = halton(40, {SequenceKind::Halton, 2, 0, 1});
  EXPECT_NEAR(star_discrepancy_nd(h).value, brute_force_nd(h), 1e-12);
}

TEST(StarDiscrepancyND, SinglePointInTheCentre) {
  const PointSet ps({SequenceKind::UniformRandom, 2, 0, 0}, 2, {0.5, 0.5});
  EXPECT_NEAR(star_discrepancy_nd(ps).value, 0.75, 1e-15);
}

TEST(StarDiscrepancyND, LowerBoundNeverExceedsExact) {
  for (int t = 0; t < 5; ++t) {
    const PointSet ps = uniform_random(60, {SequenceKind::UniformRandom, 3, 200u + t, 0});
    const double exact = star_discrepancy_nd(ps).value;
    const double lower = star_discrepancy_nd(ps, DiscrepancyMethod::LowerBoundMC, 20000, t).value;
    EXPECT_LE(lower, exact + 1e-15);
    EXPECT_GT(lower, 0.5 * exact);
  }
}

TEST(StarDiscrepancyND, CapacityLimits) {
  const PointSet big = halton(kExactMaxPoints + 1, {SequenceKind::Halton, 2, 0, 0});
  EXPECT_THROW(star_discrepancy_nd(big), CapacityExceeded);
  const PointSet wide = halton(10, {SequenceKind::Halton, kExactMaxDim + 1, 0, 0});
  EXPECT_THROW(star_discrepancy_nd(wide), CapacityExceeded);
  EXPECT_NO_THROW(star_discrepancy_nd(wide, DiscrepancyMethod::LowerBoundMC, 1000, 0));
}

TEST(LocalDiscrepancy, CountsClosedInterval) {
  const std::vector<double> x = {0.1, 0.4, 0.4, 0.9};
  EXPECT_NEAR(local_discrepancy(x, 0.4), 3.0 / 4.0 - 0.4, 1e-15);
  EXPECT_NEAR(local_discrepancy(x, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(local_discrepancy(x, 1.0), 0.0, 1e-15);
}

TEST(KoksmaBound, BoundsQuadratureErrorOfIdentity) {
  // f(x) = x has variation 1 and integral 1/2.
  for (int t = 0; t < 20; ++t) {
    const auto x = random_points(10 + 7 * t, 300 + t);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    EXPECT_LE(std::abs(mean - 0.5), koksma_bound(1.0, star_discrepancy_1d(x).value) + 1e-15);
  }
  EXPECT_THROW(koksma_bound(-1.0, 0.1), InvalidArgument);
}

TEST(SubsampleBound, FormulaAndValidation) {
  SubsampleBoundParams p;
  p.d = 2;
  p.k = 0.5;
  p.n_total = 100;
  p.c = 3.0;
  p.eps = 0.5;
  EXPECT_NEAR(subsample_discrepancy_bound(p), 2.0 / 100.0 + 1.0 + 3.0 / 10.0, 1e-14);
  p.k = 0.0;
  EXPECT_THROW(subsample_discrepancy_bound(p), InvalidArgument);
  p.k = 1.0;
  p.eps = 1.0;
  EXPECT_THROW(subsample_discrepancy_bound(p), InvalidArgument);
  p.eps = 0.5;
  p.c = -1.0;
  EXPECT_THROW(subsample_discrepancy_bound(p), InvalidArgument);
}

TEST(SubsampleBound, HoldsForFullHaltonPrefix) {
  std::vector<std::size_t> ns;
  std::vector<double> ds;
  for (std::size_t n = 64; n <= 4096; n += 7) {
    ns.push_back(n);
    ds.push_back(star_discrepancy_1d(halton(n, {SequenceKind::Halton, 1, 0, 0}).coords()).value);
  }
  const auto fit = fit_discrepancy_rate(ns, ds);
  ASSERT_GT(fit.eps, 0.0);
  ASSERT_LT(fit.eps, 1.0);
  SubsampleBoundParams p{1, 1.0, 1024, fit.c, fit.eps};
  EXPECT_LE(star_discrepancy_1d(halton(1024, {SequenceKind::Halton, 1, 0, 0}).coords()).value,
            subsample_discrepancy_bound(p));
}

TEST(DiscrepancyRateFit, RecoversExactPowerLaw) {
  std::vector<std::size_t> ns = {10, 100, 1000, 10000};
  std::vector<double> ds;
  for (auto n : ns) ds.push_back(2.5 * std::pow(static_cast<double>(n), -0.8));
  const auto fit = fit_discrepancy_rate(ns, ds);
  EXPECT_NEAR(fit.c, 2.5, 1e-10);
  EXPECT_NEAR(fit.eps, 0.2, 1e-12);
  EXPECT_NEAR(fit.slope, -0.8, 1e-12);
  EXPECT_THROW(fit_discrepancy_rate(std::vector<std::size_t>{10}, std::vector<double>{0.1}), InvalidArgument);
}
