#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrpinn/lowdisc.h"

namespace qrpinn {

struct Integrand {
  std::string name;
  std::size_t dim = 1;
  std::function<double(std::span<const double>)> eval;
  std::optional<double> exact_integral;
  std::string description;
};

// sum_i sin(2 pi x_i); integral 0.
Integrand f_sin(std::size_t d);
// prod_i exp(-x_i); integral (1 - 1/e)^d.
Integrand f_exp(std::size_t d);
// Looks up "sin" or "exp". Throws InvalidArgument for other names.
Integrand make_integrand(std::string_view name, std::size_t d);

// Mean of f over the points. Throws InvalidArgument on dimension mismatch or empty set.
double estimate(const Integrand& f, const PointSet& ps);

enum class QuadMethod { MC, QmcHalton, QmcSobol, RqmcHalton, RqmcSobol };

std::string to_string(QuadMethod method);
QuadMethod parse_quad_method(std::string_view name);

struct ConvergenceRow {
  std::size_t n = 0;
  double mean_abs_err = 0.0;
  double std_err = 0.0;  // sample standard deviation of the absolute error over seeds
  double mean_rel_err = 0.0;
};

struct ConvergenceCurve {
  QuadMethod method = QuadMethod::MC;
  std::vector<ConvergenceRow> rows;
  double fitted_slope = 0.0;      // NaN when fewer than two usable rows
  double fitted_intercept = 0.0;  // NaN when fewer than two usable rows
};

struct ConvergenceStudyConfig {
  std::vector<std::size_t> n_grid;  // ascending
  std::size_t seeds = 10;
  double n_scale = 10.0;  // RQMC pool size in multiples of N
  std::uint64_t seed = 0;
  std::uint64_t qmc_offset = 0;  // first sequence index used by the QMC/RQMC methods
};

// Rows with error below this are treated as exact and left out of the slope fit.
inline constexpr double kSlopeErrorFloor = 1e-14;

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// OLS fit of log(err) against log(N), skipping rows with err < kSlopeErrorFloor.
LogLogFit fit_log_log(std::span<const std::size_t> ns, std::span<const double> errors);

// Throws Unsupported when f has no exact integral.
std::vector<ConvergenceCurve> convergence_study(const Integrand& f, std::span<const QuadMethod> methods,
                                                const ConvergenceStudyConfig& cfg);

// Powers of two 2^lo .. 2^hi.
std::vector<std::size_t> power_of_two_grid(unsigned lo, unsigned hi);

}  // namespace qrpinn
