#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrpinn/lowdisc.h"

namespace qrpinn {

enum class ProblemKind { Poisson, AllenCahn, SineGordon };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view name);

// Steady problem  Laplace(u) + g(u) = f  on [-1,1]^d with Dirichlet data from the
// closed-form solution u*. Immutable after construction.
class PdeProblem {
 public:
  ProblemKind kind() const { return kind_; }
  std::string name() const { return to_string(kind_); }
  std::size_t dim() const { return dim_; }
  double alpha() const { return alpha_; }
  std::uint64_t coeff_seed() const { return coeff_seed_; }
  // c_i draws (empty for Poisson).
  const std::vector<double>& coeffs() const { return coeffs_; }

  double lower() const { return -1.0; }
  double upper() const { return 1.0; }

  double nonlinearity(double u) const;             // g(u)
  double nonlinearity_derivative(double u) const;  // g'(u)

  double exact(std::span<const double> x) const;
  // Analytic Laplacian of u*.
  double exact_laplacian(std::span<const double> x) const;
  double forcing(std::span<const double> x) const;

  friend PdeProblem poisson_problem(std::size_t d, double alpha);
  friend PdeProblem allen_cahn_problem(std::size_t d, std::uint64_t coeff_seed);
  friend PdeProblem sine_gordon_problem(std::size_t d, std::uint64_t coeff_seed);

 private:
  struct Parts {
    double a = 0.0, lap_a = 0.0;
    std::vector<double> grad_a;
  };
  Parts interaction_terms(std::span<const double> x) const;

  ProblemKind kind_ = ProblemKind::Poisson;
  std::size_t dim_ = 1;
  double alpha_ = 1.0;
  std::uint64_t coeff_seed_ = 0;
  std::vector<double> coeffs_;
};

// u* = exp(-alpha |x|^2), f = 2 alpha (2 alpha |x|^2 - d) u*, g = 0.
PdeProblem poisson_problem(std::size_t d, double alpha);

// u* = B A with B = 1 - |x|^2/d and A = sum_{k<d} c_k sin(x_k + cos(x_{k+1}) + x_{k+1} sin(x_k)),
// g(u) = u - u^3. Requires d >= 2.
PdeProblem allen_cahn_problem(std::size_t d, std::uint64_t coeff_seed);

// u* = B A with A = 1/(d-2) sum_{i<=d-2} c_i exp(x_i x_{i+1} x_{i+2}), g(u) = sin(u).
// Requires d >= 3.
PdeProblem sine_gordon_problem(std::size_t d, std::uint64_t coeff_seed);

// c_1..c_m from Rng(seed).normal() in order.
std::vector<double> standard_normal_coeffs(std::size_t m, std::uint64_t seed);

// |lap + g(u) - f(x)|^2
double residual(const PdeProblem& problem, double u_val, double lap_val, std::span<const double> x);

struct BoundaryBatch {
  PointSet points;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
};

// Dirichlet samples on the boundary of [-1,1]^d. Each point takes its face (one of 2d,
// coordinate fixed at -1 or +1) from the first coordinate of a d-dimensional source point
// and fills the remaining coordinates from the others, scaled to [-1,1].
// Low-discrepancy sources are subsampled uniformly (rng_seed) from a pool of
// n_scale * n sequence points; UniformRandom sources draw fresh points keyed by
// (source.seed, rng_seed).
BoundaryBatch sample_boundary(const PdeProblem& problem, std::size_t n, const GeneratorSpec& source,
                              std::uint64_t rng_seed, double n_scale = 10.0);

}  // namespace qrpinn
