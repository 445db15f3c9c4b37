#include "qrpinn/pool_sampler.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qrpinn/errors.h"
#include "qrpinn/parallel.h"
#include "qrpinn/rng.h"

namespace qrpinn {

void RadConfig::validate() const {
  if (!(k_exp > 0.0)) throw InvalidArgument("RadConfig: k must be > 0");
  if (!(c_add > 0.0)) throw InvalidArgument("RadConfig: c must be > 0");
  if (!(pool_factor > 0.0)) throw InvalidArgument("RadConfig: pool_factor must be > 0");
}

Pool::Pool(PointSet points, double n_scale) : points_(std::move(points)), n_scale_(n_scale) {
  if (!(n_scale > 0.0)) throw InvalidArgument("Pool: n_scale must be > 0");
}

const std::vector<double>& Pool::residuals() const {
  if (!residuals_) throw StateError("Pool: residual cache is empty");
  return *residuals_;
}

void Pool::set_residuals(std::vector<double> residuals) {
  if (residuals.size() != points_.size()) throw InvalidArgument("Pool: one residual per point required");
  for (double r : residuals) {
    if (!(r >= 0.0)) throw InvalidArgument("Pool: residuals must be nonnegative and finite");
  }
  residuals_ = std::move(residuals);
}

std::vector<std::size_t> uniform_batch_indices(std::size_t pool_size, std::size_t n_b, std::uint64_t seed) {
  if (n_b > pool_size) throw InvalidArgument("uniform batch: n_b exceeds pool size");
  std::vector<std::size_t> idx(pool_size);
  std::iota(idx.begin(), idx.end(), 0);
  if (n_b == pool_size) return idx;
  Rng rng(seed);
  for (std::size_t i = 0; i < n_b; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool_size - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(n_b);
  std::sort(idx.begin(), idx.end());
  return idx;
}

PointSet draw_uniform_batch(const Pool& pool, std::size_t n_b, std::uint64_t seed) {
  if (n_b == 0) throw InvalidArgument("uniform batch: n_b must be >= 1");
  const auto idx = uniform_batch_indices(pool.size(), n_b, seed);
  return pool.points().subset(idx);
}

std::vector<double> rad_weights(std::span<const double> residuals, const RadConfig& cfg) {
  cfg.validate();
  if (residuals.empty()) throw InvalidArgument("rad_weights: empty residual vector");
  std::vector<double> w(residuals.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    if (!(residuals[i] >= 0.0)) throw InvalidArgument("rad_weights: residuals must be nonnegative");
    w[i] = std::pow(residuals[i], cfg.k_exp);
    mean += w[i];
  }
  mean /= static_cast<double>(w.size());
  if (mean == 0.0) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
    return w;
  }
  double total = 0.0;
  for (double& v : w) {
    v = v / mean + cfg.c_add;
    total += v;
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<std::size_t> weighted_batch_indices(std::span<const double> weights, std::size_t n_b,
                                                std::uint64_t seed) {
  const std::size_t n = weights.size();
  if (n_b > n) throw InvalidArgument("weighted batch: n_b exceeds pool size");
  for (double v : weights) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("weighted batch: weights must be finite and >= 0");
  }
  std::vector<std::size_t> chosen;
  if (n_b == n) {
    chosen.resize(n);
    std::iota(chosen.begin(), chosen.end(), 0);
    return chosen;
  }
  std::vector<double> w(weights.begin(), weights.end());
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  Rng rng(seed);
  chosen.reserve(n_b);
  for (std::size_t draw = 0; draw < n_b; ++draw) {
    if (!(total > 0.0)) total = std::accumulate(w.begin(), w.end(), 0.0);
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = n;
    std::size_t last_positive = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] <= 0.0) continue;
      last_positive = i;
      acc += w[i];
      if (target < acc) {
        pick = i;
        break;
      }
    }
    if (pick == n) pick = last_positive;  // rounding at the top end
    if (pick == n) {
      // Remaining mass is zero: fall back to the lowest unchosen index.
      pick = static_cast<std::size_t>(std::find_if(w.begin(), w.end(), [](double v) { return v >= 0.0; }) - w.begin());
    }
    chosen.push_back(pick);
    total -= w[pick];
    w[pick] = -1.0;  // removed
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

PointSet draw_rad_batch(const Pool& pool, std::size_t n_b, const RadConfig& cfg, std::uint64_t seed) {
  if (!pool.has_residuals()) throw StateError("draw_rad_batch: pool has no residual cache");
  if (n_b == 0) throw InvalidArgument("rad batch: n_b must be >= 1");
  if (n_b > pool.size()) throw InvalidArgument("rad batch: n_b exceeds pool size");
  const auto w = rad_weights(pool.residuals(), cfg);
  return pool.points().subset(weighted_batch_indices(w, n_b, seed));
}

namespace {

long double log_binomial(long double n, long double k) {
  return std::lgamma(n + 1.0L) - std::lgamma(k + 1.0L) - std::lgamma(n - k + 1.0L);
}

void validate_coverage_args(std::size_t n_pool, std::size_t n_b, std::size_t s) {
  if (n_b == 0 || n_pool == 0) throw InvalidArgument("coverage: n_pool and n_b must be >= 1");
  if (n_b > n_pool) throw InvalidArgument("coverage: n_b exceeds n_pool");
  if (s == 0) throw InvalidArgument("coverage: s must be >= 1");
}

}  // namespace

namespace {

// Distribution of the number of covered points, epoch by epoch: k covered becomes k + j
// with probability C(n-k, j) C(k, nb-j) / C(n, nb). Every term is positive.
double coverage_by_chain(std::size_t n_pool, std::size_t n_b, std::size_t s) {
  std::vector<long double> log_fact(n_pool + 1, 0.0L);
  for (std::size_t i = 1; i <= n_pool; ++i) log_fact[i] = log_fact[i - 1] + std::log(static_cast<long double>(i));
  auto log_choose = [&](std::size_t n, std::size_t k) { return log_fact[n] - log_fact[k] - log_fact[n - k]; };
  const long double log_all = log_choose(n_pool, n_b);
  std::vector<double> p(n_pool + 1, 0.0), next(n_pool + 1);
  p[0] = 1.0;
  for (std::size_t e = 0; e < s; ++e) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t k = 0; k <= n_pool; ++k) {
      if (p[k] == 0.0) continue;
      const std::size_t j_lo = n_b > k ? n_b - k : 0;
      const std::size_t j_hi = std::min(n_b, n_pool - k);
      for (std::size_t j = j_lo; j <= j_hi; ++j) {
        const long double lp = log_choose(n_pool - k, j) + log_choose(k, n_b - j) - log_all;
        next[k + j] += p[k] * static_cast<double>(std::exp(lp));
      }
    }
    std::swap(p, next);
  }
  return p[n_pool];
}

// Work above which the chain is replaced by simulation.
constexpr double kChainBudget = 4e8;

}  // namespace

CoverageProbability coverage_probability(std::size_t n_pool, std::size_t n_b, std::size_t s) {
  validate_coverage_args(n_pool, n_b, s);
  if (n_b == n_pool) return {1.0, false};
  if (static_cast<double>(n_b) * static_cast<double>(s) < static_cast<double>(n_pool)) return {0.0, false};
  if (n_pool > kCoverageExactLimit) {
    const auto sim = simulate_coverage(n_pool, n_b, s, 20000, 0);
    return {sim.p, true};
  }
  // Terms alternate in sign and can dwarf the result, so the sum runs in extended
  // precision with Neumaier compensation.
  const long double n = static_cast<long double>(n_pool);
  const long double nb = static_cast<long double>(n_b);
  const long double log_all = log_binomial(n, nb);
  long double sum = 0.0L, comp = 0.0L, magnitude = 0.0L;
  for (std::size_t i = 0; i + n_b <= n_pool; ++i) {
    const long double di = static_cast<long double>(i);
    const long double log_term =
        log_binomial(n, di) + static_cast<long double>(s) * (log_binomial(n - di, nb) - log_all);
    const long double term = (i % 2 == 0 ? 1.0L : -1.0L) * std::exp(log_term);
    magnitude += std::abs(term);
    const long double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }
  // Each term carries the rounding of its log-gamma arguments, which grow with n and s.
  const long double term_rel_err = std::numeric_limits<long double>::epsilon() *
                                   (8.0L + 4.0L * static_cast<long double>(s + 1) * std::lgamma(n + 1.0L));
  if (magnitude * term_rel_err <= 1e-10L) return {std::clamp(static_cast<double>(sum + comp), 0.0, 1.0), false};

  // Cancellation would swamp the result: evaluate the same probability without it.
  const double work = static_cast<double>(n_pool) * static_cast<double>(n_b) * static_cast<double>(s);
  if (work <= kChainBudget) return {std::clamp(coverage_by_chain(n_pool, n_b, s), 0.0, 1.0), false};
  const auto sim = simulate_coverage(n_pool, n_b, s, 20000, 0);
  return {sim.p, true};
}

CoverageSimulation simulate_coverage(std::size_t n_pool, std::size_t n_b, std::size_t s, std::size_t trials,
                                     std::uint64_t seed) {
  validate_coverage_args(n_pool, n_b, s);
  if (trials == 0) throw InvalidArgument("simulate_coverage: trials must be >= 1");
  constexpr std::size_t kChunk = 1024;
  const std::size_t n_chunks = (trials + kChunk - 1) / kChunk;
  std::vector<std::size_t> covered(n_chunks, 0);
  parallel_for(n_chunks, [&](std::size_t c) {
    std::vector<std::size_t> perm(n_pool);
    std::vector<char> seen(n_pool);
    const std::size_t end = std::min(trials, (c + 1) * kChunk);
    for (std::size_t t = c * kChunk; t < end; ++t) {
      Rng rng(derive_seed(seed, t));
      std::iota(perm.begin(), perm.end(), 0);
      std::fill(seen.begin(), seen.end(), 0);
      std::size_t distinct = 0;
      for (std::size_t epoch = 0; epoch < s; ++epoch) {
        for (std::size_t i = 0; i < n_b; ++i) {
          const std::size_t j = i + static_cast<std::size_t>(rng.below(n_pool - i));
          std::swap(perm[i], perm[j]);
          if (!seen[perm[i]]) {
            seen[perm[i]] = 1;
            ++distinct;
          }
        }
      }
      covered[c] += distinct == n_pool;
    }
  });
  const double hits = static_cast<double>(std::accumulate(covered.begin(), covered.end(), std::size_t{0}));
  CoverageSimulation sim;
  sim.trials = trials;
  sim.p = hits / static_cast<double>(trials);
  sim.standard_error = std::sqrt(sim.p * (1.0 - sim.p) / static_cast<double>(trials));
  return sim;
}

double expected_unsampled_fraction(std::size_t n_pool, std::size_t n_b, std::size_t s) {
  validate_coverage_args(n_pool, n_b, s);
  return std::pow(1.0 - static_cast<double>(n_b) / static_cast<double>(n_pool), static_cast<double>(s));
}

}  // namespace qrpinn
