#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qrpinn/lowdisc.h"

namespace qrpinn {

// Residual-based adaptive distribution: p(x) ~ r(x)^k / mean(r^k) + c.
struct RadConfig {
  double k_exp = 1.0;
  double c_add = 1.0;
  double pool_factor = 50.0;  // pool size for the random-pool variant, in multiples of the batch

  void validate() const;
};

// A fixed candidate set (already in the PDE domain) with an optional residual cache.
class Pool {
 public:
  Pool() = default;
  explicit Pool(PointSet points, double n_scale = 1.0);

  const PointSet& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double n_scale() const { return n_scale_; }

  bool has_residuals() const { return residuals_.has_value(); }
  const std::vector<double>& residuals() const;
  // One nonnegative entry per point; throws InvalidArgument otherwise.
  void set_residuals(std::vector<double> residuals);
  void clear_residuals() { residuals_.reset(); }

 private:
  PointSet points_;
  double n_scale_ = 1.0;
  std::optional<std::vector<double>> residuals_;
};

// n_b distinct indices from [0, pool_size), uniformly without replacement, ascending.
std::vector<std::size_t> uniform_batch_indices(std::size_t pool_size, std::size_t n_b, std::uint64_t seed);

// Uniform batch without replacement. Points come back in pool order, so n_b equal to
// the pool size returns the pool itself.
PointSet draw_uniform_batch(const Pool& pool, std::size_t n_b, std::uint64_t seed);

// w_i = r_i^k / mean(r^k) + c, normalized to sum 1. All-zero residuals give uniform weights.
std::vector<double> rad_weights(std::span<const double> residuals, const RadConfig& cfg);

// Weighted sampling without replacement (sequential draws, renormalizing after each
// removal). Indices returned ascending.
std::vector<std::size_t> weighted_batch_indices(std::span<const double> weights, std::size_t n_b,
                                                std::uint64_t seed);

// Throws StateError if the pool has no residual cache.
PointSet draw_rad_batch(const Pool& pool, std::size_t n_b, const RadConfig& cfg, std::uint64_t seed);

struct CoverageProbability {
  double p = 0.0;
  bool estimated = false;  // true when computed by simulation instead of the closed form
};

// Above this pool size coverage_probability falls back to simulation.
inline constexpr std::size_t kCoverageExactLimit = 2000;

// Probability that s independent without-replacement batches of size n_b jointly
// touch all n_pool points, by inclusion-exclusion:
//   sum_i (-1)^i C(n,i) [C(n-i, n_b) / C(n, n_b)]^s
CoverageProbability coverage_probability(std::size_t n_pool, std::size_t n_b, std::size_t s);

struct CoverageSimulation {
  double p = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
};

CoverageSimulation simulate_coverage(std::size_t n_pool, std::size_t n_b, std::size_t s, std::size_t trials,
                                     std::uint64_t seed);

// Expected fraction of pool points never drawn after s epochs: (1 - n_b/n_pool)^s.
double expected_unsampled_fraction(std::size_t n_pool, std::size_t n_b, std::size_t s);

}  // namespace qrpinn
