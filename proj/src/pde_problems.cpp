#include "qrpinn/pde_problems.h"

#include <cmath>

#include "qrpinn/errors.h"
#include "qrpinn/pool_sampler.h"
#include "qrpinn/rng.h"

namespace qrpinn {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Poisson:
      return "poisson";
    case ProblemKind::AllenCahn:
      return "allen_cahn";
    case ProblemKind::SineGordon:
      return "sine_gordon";
  }
  return "unknown";
}

ProblemKind parse_problem_kind(std::string_view name) {
  if (name == "poisson") return ProblemKind::Poisson;
  if (name == "allen_cahn" || name == "allen-cahn") return ProblemKind::AllenCahn;
  if (name == "sine_gordon" || name == "sine-gordon") return ProblemKind::SineGordon;
  throw InvalidArgument("unknown problem '" + std::string(name) + "'");
}

std::vector<double> standard_normal_coeffs(std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> c(m);
  for (double& v : c) v = rng.normal();
  return c;
}

PdeProblem poisson_problem(std::size_t d, double alpha) {
  if (d == 0) throw InvalidArgument("poisson_problem: d must be >= 1");
  if (!(alpha > 0.0)) throw InvalidArgument("poisson_problem: alpha must be > 0");
  PdeProblem p;
  p.kind_ = ProblemKind::Poisson;
  p.dim_ = d;
  p.alpha_ = alpha;
  return p;
}

PdeProblem allen_cahn_problem(std::size_t d, std::uint64_t coeff_seed) {
  if (d < 2) throw InvalidArgument("allen_cahn_problem: d must be >= 2");
  PdeProblem p;
  p.kind_ = ProblemKind::AllenCahn;
  p.dim_ = d;
  p.coeff_seed_ = coeff_seed;
  p.coeffs_ = standard_normal_coeffs(d - 1, coeff_seed);
  return p;
}

PdeProblem sine_gordon_problem(std::size_t d, std::uint64_t coeff_seed) {
  if (d < 3) throw InvalidArgument("sine_gordon_problem: d must be >= 3");
  PdeProblem p;
  p.kind_ = ProblemKind::SineGordon;
  p.dim_ = d;
  p.coeff_seed_ = coeff_seed;
  p.coeffs_ = standard_normal_coeffs(d - 2, coeff_seed);
  return p;
}

double PdeProblem::nonlinearity(double u) const {
  switch (kind_) {
    case ProblemKind::Poisson:
      return 0.0;
    case ProblemKind::AllenCahn:
      return u - u * u * u;
    case ProblemKind::SineGordon:
      return std::sin(u);
  }
  return 0.0;
}

double PdeProblem::nonlinearity_derivative(double u) const {
  switch (kind_) {
    case ProblemKind::Poisson:
      return 0.0;
    case ProblemKind::AllenCahn:
      return 1.0 - 3.0 * u * u;
    case ProblemKind::SineGordon:
      return std::cos(u);
  }
  return 0.0;
}

namespace {

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

}  // namespace

// A, grad A and Laplace(A) of the interaction factor.
PdeProblem::Parts PdeProblem::interaction_terms(std::span<const double> x) const {
  Parts out;
  out.grad_a.assign(dim_, 0.0);
  if (kind_ == ProblemKind::AllenCahn) {
    // phi_k = x_k + cos(x_{k+1}) + x_{k+1} sin(x_k);  Laplace sin(phi) = cos(phi) Laplace(phi) - sin(phi) |grad phi|^2
    for (std::size_t k = 0; k + 1 < dim_; ++k) {
      const double xk = x[k], xn = x[k + 1];
      const double phi = xk + std::cos(xn) + xn * std::sin(xk);
      const double dk = 1.0 + xn * std::cos(xk);
      const double dn = -std::sin(xn) + std::sin(xk);
      const double lap_phi = -xn * std::sin(xk) - std::cos(xn);
      const double s = std::sin(phi), c = std::cos(phi);
      out.a += coeffs_[k] * s;
      out.grad_a[k] += coeffs_[k] * c * dk;
      out.grad_a[k + 1] += coeffs_[k] * c * dn;
      out.lap_a += coeffs_[k] * (c * lap_phi - s * (dk * dk + dn * dn));
    }
  } else if (kind_ == ProblemKind::SineGordon) {
    // psi_i = x_i x_{i+1} x_{i+2} is linear in each variable, so Laplace exp(psi) = exp(psi) |grad psi|^2.
    const double scale = 1.0 / static_cast<double>(dim_ - 2);
    for (std::size_t i = 0; i + 2 < dim_; ++i) {
      const double x0 = x[i], x1 = x[i + 1], x2 = x[i + 2];
      const double e = coeffs_[i] * scale * std::exp(x0 * x1 * x2);
      const double g0 = x1 * x2, g1 = x0 * x2, g2 = x0 * x1;
      out.a += e;
      out.grad_a[i] += e * g0;
      out.grad_a[i + 1] += e * g1;
      out.grad_a[i + 2] += e * g2;
      out.lap_a += e * (g0 * g0 + g1 * g1 + g2 * g2);
    }
  }
  return out;
}

double PdeProblem::exact(std::span<const double> x) const {
  if (x.size() != dim_) throw InvalidArgument("PdeProblem::exact: dimension mismatch");
  const double r2 = squared_norm(x);
  if (kind_ == ProblemKind::Poisson) return std::exp(-alpha_ * r2);
  const double b = 1.0 - r2 / static_cast<double>(dim_);
  return b * interaction_terms(x).a;
}

double PdeProblem::exact_laplacian(std::span<const double> x) const {
  if (x.size() != dim_) throw InvalidArgument("PdeProblem::exact_laplacian: dimension mismatch");
  const double r2 = squared_norm(x);
  const double d = static_cast<double>(dim_);
  if (kind_ == ProblemKind::Poisson) return 2.0 * alpha_ * (2.0 * alpha_ * r2 - d) * std::exp(-alpha_ * r2);
  // Laplace(AB) = B Laplace(A) + A Laplace(B) + 2 grad A . grad B, with grad B = -2x/d, Laplace(B) = -2.
  const Parts parts = interaction_terms(x);
  const double b = 1.0 - r2 / d;
  double cross = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) cross += parts.grad_a[j] * (-2.0 * x[j] / d);
  return b * parts.lap_a + parts.a * (-2.0) + 2.0 * cross;
}

double PdeProblem::forcing(std::span<const double> x) const {
  return exact_laplacian(x) + nonlinearity(exact(x));
}

double residual(const PdeProblem& problem, double u_val, double lap_val, std::span<const double> x) {
  const double r = lap_val + problem.nonlinearity(u_val) - problem.forcing(x);
  return r * r;
}

BoundaryBatch sample_boundary(const PdeProblem& problem, std::size_t n, const GeneratorSpec& source,
                              std::uint64_t rng_seed, double n_scale) {
  if (n == 0) throw InvalidArgument("sample_boundary: n must be >= 1");
  const std::size_t d = problem.dim();
  GeneratorSpec spec = source;
  spec.dim = d;

  PointSet unit;
  if (spec.kind == SequenceKind::UniformRandom) {
    spec.seed = derive_seed(source.seed, rng_seed);
    unit = uniform_random(n, spec);
  } else {
    if (!(n_scale >= 1.0)) throw InvalidArgument("sample_boundary: n_scale must be >= 1");
    const auto pool_size = static_cast<std::size_t>(std::llround(n_scale * static_cast<double>(n)));
    Pool pool(generate(std::max(pool_size, n), spec), n_scale);
    unit = draw_uniform_batch(pool, n, rng_seed);
  }

  const double lo = problem.lower(), hi = problem.upper();
  std::vector<double> coords(n * d);
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto u = unit.point(i);
    const auto face = std::min<std::size_t>(static_cast<std::size_t>(u[0] * 2.0 * static_cast<double>(d)), 2 * d - 1);
    const std::size_t axis = face / 2;
    double* p = &coords[i * d];
    // The remaining d-1 source coordinates fill the free axes in order.
    std::size_t src = 1;
    for (std::size_t j = 0; j < d; ++j) {
      if (j == axis) {
        p[j] = (face % 2 == 0) ? lo : hi;
      } else {
        p[j] = lo + (hi - lo) * u[src++];
      }
    }
    values[i] = problem.exact({p, d});
  }
  GeneratorSpec tagged = spec;
  return {PointSet(tagged, d, std::move(coords)), std::move(values)};
}

}  // namespace qrpinn
