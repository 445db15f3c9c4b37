#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "qrpinn/lowdisc.h"
#include "qrpinn/pde_problems.h"

namespace qrpinn {

struct DenseLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

// Fully connected network widths = [d, w_1, ..., w_L, 1]; tanh on hidden layers,
// identity on the output.
class MlpParams {
 public:
  MlpParams() = default;
  // Zero-initialized parameters.
  explicit MlpParams(std::vector<std::size_t> widths, std::uint64_t seed = 0);

  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t input_dim() const { return widths_.front(); }
  std::uint64_t seed() const { return seed_; }
  std::size_t layer_count() const { return layers_.size(); }
  const DenseLayer& layer(std::size_t l) const { return layers_[l]; }
  DenseLayer& layer(std::size_t l) { return layers_[l]; }

  std::size_t parameter_count() const;
  // Layer by layer: weight in column-major order, then bias.
  Eigen::VectorXd flatten() const;
  void assign(const Eigen::VectorXd& flat);

  bool all_finite() const;

 private:
  std::vector<std::size_t> widths_;
  std::vector<DenseLayer> layers_;
  std::uint64_t seed_ = 0;
};

// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases. Widths must
// have at least two entries and end in 1.
MlpParams init_params(const std::vector<std::size_t>& widths, std::uint64_t seed);

// Value together with first and second derivatives along one fixed input direction.
struct SecondOrderJet {
  double value = 0.0;
  double first = 0.0;
  double second = 0.0;

  static SecondOrderJet constant(double c) { return {c, 0.0, 0.0}; }
  static SecondOrderJet variable(double x, double direction) { return {x, direction, 0.0}; }
};

inline SecondOrderJet operator+(SecondOrderJet a, SecondOrderJet b) {
  return {a.value + b.value, a.first + b.first, a.second + b.second};
}
inline SecondOrderJet operator-(SecondOrderJet a, SecondOrderJet b) {
  return {a.value - b.value, a.first - b.first, a.second - b.second};
}
inline SecondOrderJet operator*(SecondOrderJet a, SecondOrderJet b) {
  return {a.value * b.value, a.first * b.value + a.value * b.first,
          a.second * b.value + 2.0 * a.first * b.first + a.value * b.second};
}
inline SecondOrderJet operator*(double s, SecondOrderJet a) { return {s * a.value, s * a.first, s * a.second}; }

inline SecondOrderJet tanh(SecondOrderJet a) {
  const double t = std::tanh(a.value);
  const double d1 = 1.0 - t * t;
  const double d2 = -2.0 * t * d1;
  return {t, d1 * a.first, d2 * a.first * a.first + d1 * a.second};
}

double forward(const MlpParams& params, std::span<const double> x);

// Network output propagated as jets seeded along direction `dir`.
SecondOrderJet forward_jet(const MlpParams& params, std::span<const double> x, std::span<const double> dir);

// u and its input Laplacian from d jet passes along the coordinate axes.
std::pair<double, double> value_and_laplacian(const MlpParams& params, std::span<const double> x);

// Batched u and Laplacian for many points (same arithmetic as the training path).
struct BatchEvaluation {
  std::vector<double> u;
  std::vector<double> laplacian;
};
BatchEvaluation evaluate_batch(const MlpParams& params, const PointSet& points);

// Batched u only.
std::vector<double> predict(const MlpParams& params, const PointSet& points);

// Interior collocation points with their forcing values cached.
struct InteriorBatch {
  PointSet points;
  std::vector<double> forcing;
};
InteriorBatch make_interior_batch(const PdeProblem& problem, PointSet points);

struct LossAndGrad {
  double loss = 0.0;
  double residual_loss = 0.0;
  double boundary_loss = 0.0;
  Eigen::VectorXd grad;  // same layout as MlpParams::flatten()
};

// loss = mean_interior |Lap u + g(u) - f|^2 + weight_bc * mean_boundary |u - u*|^2,
// and its exact gradient with respect to every parameter. The jet forward pass is
// recorded layer by layer and differentiated in reverse. An empty boundary batch
// drops the boundary term.
LossAndGrad loss_and_grad(const MlpParams& params, const InteriorBatch& interior, const BoundaryBatch& boundary,
                          const PdeProblem& problem, double weight_bc = 1.0);
LossAndGrad loss_and_grad(const MlpParams& params, const PointSet& interior, const BoundaryBatch& boundary,
                          const PdeProblem& problem, double weight_bc = 1.0);

// Loss of an arbitrary model given as (u, Laplacian) at a point; same formula as
// loss_and_grad without the gradient.
template <typename Model>
double composite_loss(const Model& model, const PointSet& interior, const BoundaryBatch& boundary,
                      const PdeProblem& problem, double weight_bc = 1.0) {
  double lr = 0.0;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const auto [u, lap] = model(interior.point(i));
    lr += residual(problem, u, lap, interior.point(i));
  }
  lr /= static_cast<double>(interior.size());
  double lb = 0.0;
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const double e = model(boundary.points.point(i)).first - boundary.values[i];
    lb += e * e;
  }
  if (boundary.size() > 0) lb /= static_cast<double>(boundary.size());
  return lr + weight_bc * lb;
}

// Checkpoint: first line a JSON header {"widths":[...],"activation":"tanh","seed":s,
// "parameter_count":n}, then the flattened parameters, one per line, %.17g.
void save_checkpoint(std::ostream& out, const MlpParams& params);
MlpParams load_checkpoint(std::istream& in);

}  // namespace qrpinn
