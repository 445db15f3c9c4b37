#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qrpinn/lowdisc.h"

namespace qrpinn {

enum class DiscrepancyMethod { Exact1D, ExactEnumND, LowerBoundMC };

std::string to_string(DiscrepancyMethod method);

struct DiscrepancyReport {
  std::size_t n = 0;
  std::size_t dim = 0;
  double value = 0.0;
  DiscrepancyMethod method = DiscrepancyMethod::Exact1D;
};

// Limits for exhaustive enumeration in star_discrepancy_nd.
inline constexpr std::size_t kExactMaxPoints = 512;
inline constexpr std::size_t kExactMaxDim = 4;

// Exact 1D star discrepancy of points in [0,1]:
//   D* = 1/(2N) + max_n |x_(n) - (2n-1)/(2N)|  over the sorted values.
DiscrepancyReport star_discrepancy_1d(std::span<const double> points);

// ExactEnumND: supremum over anchored boxes [0,u) with every u_j drawn from the point
// coordinates or 1, using the open count for "volume exceeds count" and the closed count
// (the limit from above) for "count exceeds volume". Throws CapacityExceeded beyond
// kExactMaxPoints / kExactMaxDim.
//
// LowerBoundMC: evaluates `samples` random corners (half uniform, half snapped to
// point coordinates); every evaluated corner is a valid lower bound on D*.
DiscrepancyReport star_discrepancy_nd(const PointSet& ps,
                                      DiscrepancyMethod method = DiscrepancyMethod::ExactEnumND,
                                      std::size_t samples = 100000, std::uint64_t seed = 0);

// (#{x_i <= y}) / N - y.
double local_discrepancy(std::span<const double> points, double y);

// V(f) * D*: upper bound on the quadrature error of a point set.
double koksma_bound(double variation, double dstar);

// Parameters of the discrepancy bound for an N = k * n_total subsample of a
// deterministic sequence prefix whose own discrepancy decays like C n_total^-(1-eps).
struct SubsampleBoundParams {
  std::size_t d = 1;
  double k = 1.0;
  std::size_t n_total = 1;
  double c = 0.0;
  double eps = 0.5;

  void validate() const;
};

// d / (2 k n_total) + d (1 - k) + C n_total^-(1-eps)
double subsample_discrepancy_bound(const SubsampleBoundParams& p);

// Least-squares fit of log D* = log C - (1 - eps) log N.
struct DiscrepancyRateFit {
  double c = 0.0;
  double eps = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
};

DiscrepancyRateFit fit_discrepancy_rate(std::span<const std::size_t> ns, std::span<const double> dstars);

}  // namespace qrpinn
