#include "qrpinn/quadrature.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "qrpinn/errors.h"
#include "qrpinn/parallel.h"
#include "qrpinn/pool_sampler.h"
#include "qrpinn/rng.h"

namespace qrpinn {

Integrand f_sin(std::size_t d) {
  if (d == 0) throw InvalidArgument("f_sin: d must be >= 1");
  Integrand f;
  f.name = "sin";
  f.dim = d;
  f.eval = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::sin(2.0 * std::numbers::pi * v);
    return s;
  };
  f.exact_integral = 0.0;
  f.description = "sum_i sin(2 pi x_i) on [0,1]^d";
  return f;
}

Integrand f_exp(std::size_t d) {
  if (d == 0) throw InvalidArgument("f_exp: d must be >= 1");
  Integrand f;
  f.name = "exp";
  f.dim = d;
  f.eval = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v;
    return std::exp(-s);
  };
  f.exact_integral = std::pow(1.0 - std::exp(-1.0), static_cast<double>(d));
  f.description = "prod_i exp(-x_i) on [0,1]^d";
  return f;
}

Integrand make_integrand(std::string_view name, std::size_t d) {
  if (name == "sin" || name == "f_sin") return f_sin(d);
  if (name == "exp" || name == "f_exp") return f_exp(d);
  throw InvalidArgument("unknown integrand '" + std::string(name) + "' (expected f_sin or f_exp)");
}

double estimate(const Integrand& f, const PointSet& ps) {
  if (ps.dim() != f.dim) throw InvalidArgument("estimate: point dimension does not match integrand");
  if (ps.empty()) throw InvalidArgument("estimate: empty point set");
  double sum = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) sum += f.eval(ps.point(i));
  return sum / static_cast<double>(ps.size());
}

std::string to_string(QuadMethod method) {
  switch (method) {
    case QuadMethod::MC:
      return "mc";
    case QuadMethod::QmcHalton:
      return "qmc_halton";
    case QuadMethod::QmcSobol:
      return "qmc_sobol";
    case QuadMethod::RqmcHalton:
      return "rqmc_halton";
    case QuadMethod::RqmcSobol:
      return "rqmc_sobol";
  }
  return "unknown";
}

QuadMethod parse_quad_method(std::string_view name) {
  for (auto m : {QuadMethod::MC, QuadMethod::QmcHalton, QuadMethod::QmcSobol, QuadMethod::RqmcHalton,
                 QuadMethod::RqmcSobol}) {
    if (name == to_string(m)) return m;
  }
  throw InvalidArgument("unknown quadrature method '" + std::string(name) + "'");
}

LogLogFit fit_log_log(std::span<const std::size_t> ns, std::span<const double> errors) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  if (ns.size() != errors.size()) throw InvalidArgument("fit_log_log: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(errors[i] >= kSlopeErrorFloor) || !std::isfinite(errors[i])) continue;
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    m += 1;
  }
  const double denom = m * sxx - sx * sx;
  if (m < 2 || denom <= 0.0) return {nan, nan};
  const double slope = (m * sxy - sx * sy) / denom;
  return {slope, (sy - slope * sx) / m};
}

namespace {

bool is_deterministic(QuadMethod m) { return m == QuadMethod::QmcHalton || m == QuadMethod::QmcSobol; }

SequenceKind sequence_of(QuadMethod m) {
  switch (m) {
    case QuadMethod::QmcHalton:
    case QuadMethod::RqmcHalton:
      return SequenceKind::Halton;
    case QuadMethod::QmcSobol:
    case QuadMethod::RqmcSobol:
      return SequenceKind::Sobol;
    case QuadMethod::MC:
      return SequenceKind::UniformRandom;
  }
  return SequenceKind::UniformRandom;
}

double run_once(const Integrand& f, QuadMethod method, std::size_t n, std::size_t seed_index,
                const ConvergenceStudyConfig& cfg) {
  const std::uint64_t stream = derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(method)),
                                           (static_cast<std::uint64_t>(n) << 20) + seed_index);
  switch (method) {
    case QuadMethod::MC:
      return estimate(f, uniform_random(n, {SequenceKind::UniformRandom, f.dim, stream, 0}));
    case QuadMethod::QmcHalton:
    case QuadMethod::QmcSobol:
      return estimate(f, generate(n, {sequence_of(method), f.dim, 0, cfg.qmc_offset}));
    case QuadMethod::RqmcHalton:
    case QuadMethod::RqmcSobol: {
      const auto pool_size = static_cast<std::size_t>(std::llround(cfg.n_scale * static_cast<double>(n)));
      Pool pool(generate(std::max(pool_size, n), {sequence_of(method), f.dim, 0, cfg.qmc_offset}), cfg.n_scale);
      return estimate(f, draw_uniform_batch(pool, n, stream));
    }
  }
  throw InvalidArgument("unknown quadrature method");
}

}  // namespace

std::vector<ConvergenceCurve> convergence_study(const Integrand& f, std::span<const QuadMethod> methods,
                                                const ConvergenceStudyConfig& cfg) {
  if (!f.exact_integral) throw Unsupported("convergence_study: integrand '" + f.name + "' has no exact integral");
  if (cfg.n_grid.empty()) throw InvalidArgument("convergence_study: empty N grid");
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    if (cfg.n_grid[i] == 0 || (i > 0 && cfg.n_grid[i] <= cfg.n_grid[i - 1])) {
      throw InvalidArgument("convergence_study: N grid must be positive and strictly ascending");
    }
  }
  if (cfg.seeds == 0) throw InvalidArgument("convergence_study: seeds must be >= 1");
  if (!(cfg.n_scale >= 1.0)) throw InvalidArgument("convergence_study: n_scale must be >= 1");

  const double exact = *f.exact_integral;
  std::vector<ConvergenceCurve> curves;
  for (QuadMethod method : methods) {
    const std::size_t seeds = is_deterministic(method) ? 1 : cfg.seeds;
    const std::size_t n_rows = cfg.n_grid.size();
    std::vector<double> errors(n_rows * seeds);
    parallel_for(n_rows * seeds, [&](std::size_t task) {
      const std::size_t row = task / seeds;
      errors[task] = std::abs(run_once(f, method, cfg.n_grid[row], task % seeds, cfg) - exact);
    });

    ConvergenceCurve curve;
    curve.method = method;
    std::vector<double> means;
    for (std::size_t row = 0; row < n_rows; ++row) {
      double mean = 0.0;
      for (std::size_t s = 0; s < seeds; ++s) mean += errors[row * seeds + s];
      mean /= static_cast<double>(seeds);
      double var = 0.0;
      for (std::size_t s = 0; s < seeds; ++s) var += std::pow(errors[row * seeds + s] - mean, 2);
      const double sd = seeds > 1 ? std::sqrt(var / static_cast<double>(seeds - 1)) : 0.0;
      const double rel = exact != 0.0 ? mean / std::abs(exact) : std::numeric_limits<double>::quiet_NaN();
      curve.rows.push_back({cfg.n_grid[row], mean, sd, rel});
      means.push_back(mean);
    }
    const auto fit = fit_log_log(cfg.n_grid, means);
    curve.fitted_slope = fit.slope;
    curve.fitted_intercept = fit.intercept;
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::vector<std::size_t> power_of_two_grid(unsigned lo, unsigned hi) {
  if (lo > hi || hi > 40) throw InvalidArgument("power_of_two_grid: bad exponent range");
  std::vector<std::size_t> grid;
  for (unsigned e = lo; e <= hi; ++e) grid.push_back(std::size_t{1} << e);
  return grid;
}

}  // namespace qrpinn
