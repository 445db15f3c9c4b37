#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "qrpinn/errors.h"
#include "qrpinn/lowdisc.h"
#include "qrpinn/mlp.h"
#include "qrpinn/pde_problems.h"
#include "qrpinn/rng.h"

using namespace qrpinn;

namespace {

// Fourth-order central second difference of the scalar forward pass along each axis.
double fd_laplacian(const MlpParams& p, std::vector<double> x, double h = 1e-3) {
  const double f0 = forward(p, x);
  double lap = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double xj = x[j];
    auto at = [&](double t) {
      x[j] = xj + t;
      return forward(p, x);
    };
    lap += (-at(2 * h) + 16 * at(h) - 30 * f0 + 16 * at(-h) - at(-2 * h)) / (12 * h * h);
    x[j] = xj;
  }
  return lap;
}

std::vector<double> random_point(Rng& rng, std::size_t d) {
  std::vector<double> x(d);
  for (auto& v : x) v = 2.0 * rng.uniform() - 1.0;
  return x;
}

PointSet random_box_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  const std::vector<double> lo(d, -1.0), hi(d, 1.0);
  return scale_to_box(uniform_random(n, {SequenceKind::UniformRandom, d, seed, 0}), lo, hi);
}

std::vector<std::size_t> random_widths(Rng& rng, std::size_t d) {
  std::vector<std::size_t> w = {d};
  const std::size_t layers = 1 + rng.below(3);
  for (std::size_t l = 0; l < layers; ++l) w.push_back(2 + rng.below(15));
  w.push_back(1);
  return w;
}

// Central differences of the composite loss over every flattened parameter.
Eigen::VectorXd fd_gradient(const MlpParams& params, const PointSet& interior, const BoundaryBatch& bc,
                            const PdeProblem& problem, double weight_bc, double h = 1e-6) {
  const Eigen::VectorXd theta = params.flatten();
  Eigen::VectorXd g(theta.size());
  MlpParams probe = params;
  auto loss_at = [&](const Eigen::VectorXd& t) {
    probe.assign(t);
    return composite_loss([&](std::span<const double> x) { return value_and_laplacian(probe, x); }, interior, bc,
                          problem, weight_bc);
  };
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    Eigen::VectorXd tp = theta, tm = theta;
    tp(i) += h;
    tm(i) -= h;
    g(i) = (loss_at(tp) - loss_at(tm)) / (2 * h);
  }
  return g;
}

void expect_gradient_matches(const MlpParams& params, const PdeProblem& problem, std::size_t n_int,
                             std::size_t n_bc, double weight_bc, std::uint64_t seed) {
  const std::size_t d = problem.dim();
  const PointSet interior = random_box_points(n_int, d, seed);
  const BoundaryBatch bc = n_bc == 0 ? BoundaryBatch{PointSet({SequenceKind::UniformRandom, d, 0, 0}, d, {}), {}}
                                     : sample_boundary(problem, n_bc, {SequenceKind::UniformRandom, d, seed, 0}, 1);
  const LossAndGrad lg = loss_and_grad(params, interior, bc, problem, weight_bc);
  const Eigen::VectorXd fd = fd_gradient(params, interior, bc, problem, weight_bc);
  ASSERT_EQ(lg.grad.size(), fd.size());
  const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < fd.size(); ++i) {
    EXPECT_NEAR(lg.grad(i), fd(i), 1e-6 * scale) << "parameter " << i;
  }
  const double direct =
      composite_loss([&](std::span<const double> x) { return value_and_laplacian(params, x); }, interior, bc,
                     problem, weight_bc);
  EXPECT_NEAR(lg.loss, direct, 1e-12 * std::max(1.0, direct));
  EXPECT_NEAR(lg.loss, lg.residual_loss + weight_bc * lg.boundary_loss, 1e-12 * std::max(1.0, direct));
}

}  // namespace

TEST(Jet, ArithmeticMatchesAnalyticDerivatives) {
  // f(x) = tanh(x^2 + 3x) at x = 0.4 along direction 1.
  const double x0 = 0.4;
  const SecondOrderJet x = SecondOrderJet::variable(x0, 1.0);
  const SecondOrderJet f = tanh(x * x + 3.0 * x);
  const double z = x0 * x0 + 3 * x0, t = std::tanh(z), s = 1 - t * t;
  const double dz = 2 * x0 + 3;
  EXPECT_NEAR(f.value, t, 1e-15);
  EXPECT_NEAR(f.first, s * dz, 1e-14);
  EXPECT_NEAR(f.second, -2 * t * s * dz * dz + s * 2, 1e-13);

  const SecondOrderJet c = SecondOrderJet::constant(2.0);
  const SecondOrderJet g = c * x - x + c;
  EXPECT_EQ(g.value, 2.0 * x0 - x0 + 2.0);
  EXPECT_EQ(g.first, 1.0);
  EXPECT_EQ(g.second, 0.0);
}

TEST(Jet, DirectionScalesDerivatives) {
  const MlpParams p = init_params({2, 8, 1}, 3);
  const std::vector<double> x = {0.2, -0.3};
  const auto a = forward_jet(p, x, std::vector<double>{1.0, 0.0});
  const auto b = forward_jet(p, x, std::vector<double>{2.0, 0.0});
  EXPECT_NEAR(b.first, 2 * a.first, 1e-14);
  EXPECT_NEAR(b.second, 4 * a.second, 1e-13);
  EXPECT_NEAR(a.value, forward(p, x), 1e-15);
}

TEST(ValueAndLaplacian, MatchesFiniteDifferencesOnRandomNets) {
  Rng rng(2024);
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + rng.below(3);
    const MlpParams p = init_params(random_widths(rng, d), 100 + t);
    const auto x = random_point(rng, d);
    const auto [u, lap] = value_and_laplacian(p, x);
    EXPECT_NEAR(u, forward(p, x), 1e-14);
    const double fd = fd_laplacian(p, x);
    EXPECT_LE(std::abs(lap - fd), 1e-4 * std::abs(fd) + 1e-7) << "net " << t;
  }
}

TEST(ValueAndLaplacian, LinearNetHasZeroLaplacian) {
  MlpParams p = init_params({2, 1}, 0);
  p.layer(0).weight << 2.0, -3.0;
  p.layer(0).bias << 0.5;
  const std::vector<double> x = {1.0, 1.0};
  const auto [u, lap] = value_and_laplacian(p, x);
  EXPECT_EQ(u, -0.5);
  EXPECT_EQ(lap, 0.0);
}

TEST(EvaluateBatch, AgreesWithScalarPath) {
  const MlpParams p = init_params({3, 20, 20, 1}, 9);
  const PointSet pts = random_box_points(700, 3, 4);
  const auto batch = evaluate_batch(p, pts);
  const auto values = predict(p, pts);
  ASSERT_EQ(batch.u.size(), 700u);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto [u, lap] = value_and_laplacian(p, pts.point(i));
    EXPECT_NEAR(batch.u[i], u, 1e-12);
    EXPECT_NEAR(batch.laplacian[i], lap, 1e-12);
    EXPECT_NEAR(values[i], u, 1e-12);
  }
  EXPECT_THROW(evaluate_batch(p, uniform_random(3, {SequenceKind::UniformRandom, 2, 0, 0})), InvalidArgument);
}

TEST(LossAndGrad, MatchesFiniteDifferencesPoisson) {
  const PdeProblem problem = poisson_problem(2, 2.0);
  expect_gradient_matches(init_params({2, 16, 16, 1}, 1), problem, 12, 6, 1.0, 11);
  expect_gradient_matches(init_params({2, 5, 1}, 2), problem, 7, 0, 1.0, 12);
}

TEST(LossAndGrad, MatchesFiniteDifferencesNonlinearProblems) {
  expect_gradient_matches(init_params({2, 8, 8, 1}, 3), allen_cahn_problem(2, 0), 10, 5, 2.5, 13);
  expect_gradient_matches(init_params({3, 6, 6, 6, 1}, 4), sine_gordon_problem(3, 0), 8, 4, 1.0, 14);
}

TEST(LossAndGrad, ChunkedBatchMatchesComposite) {
  // More points than one evaluation chunk.
  const PdeProblem problem = poisson_problem(2, 1.0);
  const MlpParams p = init_params({2, 10, 10, 1}, 5);
  const PointSet interior = random_box_points(600, 2, 3);
  const BoundaryBatch bc = sample_boundary(problem, 300, {SequenceKind::Sobol, 2, 0, 0}, 1);
  const auto lg = loss_and_grad(p, interior, bc, problem);
  const double direct =
      composite_loss([&](std::span<const double> x) { return value_and_laplacian(p, x); }, interior, bc, problem);
  EXPECT_NEAR(lg.loss, direct, 1e-12 * direct);
  const auto again = loss_and_grad(p, make_interior_batch(problem, interior), bc, problem);
  EXPECT_EQ(lg.loss, again.loss);
  EXPECT_EQ(lg.grad, again.grad);
}

TEST(Params, GlorotBoundsAndZeroBias) {
  const MlpParams p = init_params({4, 30, 7, 1}, 8);
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    const auto& layer = p.layer(l);
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
    EXPECT_LE(layer.weight.cwiseAbs().maxCoeff(), limit);
    EXPECT_GT(layer.weight.cwiseAbs().maxCoeff(), 0.5 * limit);
    EXPECT_EQ(layer.bias.cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(p.parameter_count(), 4u * 30 + 30 + 30 * 7 + 7 + 7 + 1);
  EXPECT_EQ(init_params({4, 30, 7, 1}, 8).flatten(), p.flatten());
  EXPECT_NE(init_params({4, 30, 7, 1}, 9).flatten(), p.flatten());
  EXPECT_THROW(init_params({4}, 0), InvalidArgument);
  EXPECT_THROW(init_params({4, 3, 2}, 0), InvalidArgument);
}

TEST(Params, FlattenLayoutAndAssign) {
  MlpParams p = init_params({2, 3, 1}, 1);
  const Eigen::VectorXd flat = p.flatten();
  // Column-major weight of the first layer comes first.
  EXPECT_EQ(flat(0), p.layer(0).weight(0, 0));
  EXPECT_EQ(flat(1), p.layer(0).weight(1, 0));
  EXPECT_EQ(flat(3), p.layer(0).weight(0, 1));
  EXPECT_EQ(flat(6), p.layer(0).bias(0));
  Eigen::VectorXd shifted = flat.array() + 1.0;
  p.assign(shifted);
  EXPECT_EQ(p.flatten(), shifted);
  EXPECT_THROW(p.assign(Eigen::VectorXd::Zero(3)), InvalidArgument);
  EXPECT_TRUE(p.all_finite());
  shifted(2) = std::nan("");
  p.assign(shifted);
  EXPECT_FALSE(p.all_finite());
}

TEST(Checkpoint, RoundTripIsExact) {
  const MlpParams p = init_params({3, 12, 5, 1}, 77);
  std::stringstream ss;
  save_checkpoint(ss, p);
  const MlpParams q = load_checkpoint(ss);
  EXPECT_EQ(q.widths(), p.widths());
  EXPECT_EQ(q.seed(), p.seed());
  EXPECT_EQ(q.flatten(), p.flatten());
}

TEST(Checkpoint, RejectsMalformedInput) {
  std::stringstream empty;
  EXPECT_THROW(load_checkpoint(empty), InvalidArgument);
  std::stringstream bad("not json\n1\n");
  EXPECT_THROW(load_checkpoint(bad), InvalidArgument);
  std::stringstream relu(R"({"widths":[1,1],"activation":"relu","seed":0,"parameter_count":2})"
                         "\n1\n2\n");
  EXPECT_THROW(load_checkpoint(relu), InvalidArgument);
  std::stringstream short_list(R"({"widths":[1,1],"activation":"tanh","seed":0,"parameter_count":2})"
                               "\n1\n");
  EXPECT_THROW(load_checkpoint(short_list), InvalidArgument);
}
