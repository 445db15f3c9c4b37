#include "qrpinn/mlp.h"

#include <cstdio>
#if defined(__GLIBC__)
#include <malloc.h>
#endif
#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"
#include "qrpinn/errors.h"
#include "qrpinn/parallel.h"
#include "qrpinn/rng.h"

namespace qrpinn {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MlpParams::MlpParams(std::vector<std::size_t> widths, std::uint64_t seed) : widths_(std::move(widths)), seed_(seed) {
  if (widths_.size() < 2) throw InvalidArgument("MlpParams: need at least input and output widths");
  if (widths_.back() != 1) throw InvalidArgument("MlpParams: output width must be 1");
  for (std::size_t w : widths_) {
    if (w == 0) throw InvalidArgument("MlpParams: zero layer width");
  }
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const auto in = static_cast<Eigen::Index>(widths_[l]);
    const auto out = static_cast<Eigen::Index>(widths_[l + 1]);
    layers_.push_back({MatrixXd::Zero(out, in), VectorXd::Zero(out)});
  }
}

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers_) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return n;
}

VectorXd MlpParams::flatten() const {
  VectorXd flat(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Index pos = 0;
  for (const auto& layer : layers_) {
    flat.segment(pos, layer.weight.size()) = layer.weight.reshaped();
    pos += layer.weight.size();
    flat.segment(pos, layer.bias.size()) = layer.bias;
    pos += layer.bias.size();
  }
  return flat;
}

void MlpParams::assign(const VectorXd& flat) {
  if (static_cast<std::size_t>(flat.size()) != parameter_count()) {
    throw InvalidArgument("MlpParams::assign: expected " + std::to_string(parameter_count()) + " values");
  }
  Eigen::Index pos = 0;
  for (auto& layer : layers_) {
    layer.weight.reshaped() = flat.segment(pos, layer.weight.size());
    pos += layer.weight.size();
    layer.bias = flat.segment(pos, layer.bias.size());
    pos += layer.bias.size();
  }
}

bool MlpParams::all_finite() const {
  for (const auto& layer : layers_) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

MlpParams init_params(const std::vector<std::size_t>& widths, std::uint64_t seed) {
  MlpParams params(widths, seed);
  Rng rng(seed);
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    auto& w = params.layer(l).weight;
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = bound * (2.0 * rng.uniform() - 1.0);
    }
  }
  return params;
}

namespace {

void check_input(const MlpParams& params, std::span<const double> x) {
  if (params.layer_count() == 0) throw InvalidArgument("network has no layers");
  if (x.size() != params.input_dim()) throw InvalidArgument("input dimension does not match network");
}

}  // namespace

double forward(const MlpParams& params, std::span<const double> x) {
  check_input(params, x);
  VectorXd h = Eigen::Map<const VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  const std::size_t last = params.layer_count() - 1;
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    VectorXd z = params.layer(l).weight * h + params.layer(l).bias;
    h = l == last ? z : VectorXd(z.array().tanh());
  }
  return h(0);
}

SecondOrderJet forward_jet(const MlpParams& params, std::span<const double> x, std::span<const double> dir) {
  check_input(params, x);
  if (dir.size() != x.size()) throw InvalidArgument("forward_jet: direction dimension mismatch");
  std::vector<SecondOrderJet> h(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) h[j] = SecondOrderJet::variable(x[j], dir[j]);
  const std::size_t last = params.layer_count() - 1;
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const auto& layer = params.layer(l);
    std::vector<SecondOrderJet> z(static_cast<std::size_t>(layer.weight.rows()));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      SecondOrderJet acc = SecondOrderJet::constant(layer.bias(r));
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) acc = acc + layer.weight(r, c) * h[c];
      z[r] = l == last ? acc : tanh(acc);
    }
    h = std::move(z);
  }
  return h[0];
}

std::pair<double, double> value_and_laplacian(const MlpParams& params, std::span<const double> x) {
  check_input(params, x);
  std::vector<double> dir(x.size(), 0.0);
  double u = 0.0, lap = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    dir[j] = 1.0;
    const SecondOrderJet jet = forward_jet(params, x, dir);
    dir[j] = 0.0;
    u = jet.value;
    lap += jet.second;
  }
  return {u, lap};
}

namespace {

// Points per chunk of the batched passes; chunks are reduced in index order.
constexpr std::size_t kChunk = 256;

// Recorded jet forward pass for a chunk of B points, d directions. Direction j occupies
// columns [j*B, (j+1)*B) of the first/second-derivative matrices.
struct JetTape {
  std::size_t batch = 0;
  std::size_t dirs = 0;
  MatrixXd input;           // d x B
  std::vector<MatrixXd> a;  // tanh(z) per hidden layer, w x B
  std::vector<MatrixXd> s1, s2;
  std::vector<MatrixXd> z1, z2;  // pre-activation jets, w x dB
  std::vector<MatrixXd> h1, h2;  // post-activation jets, w x dB
  Eigen::RowVectorXd u;
  Eigen::RowVectorXd lap;
};

// tanh through the vectorised exp; Eigen's own tanh is scalar for doubles.
MatrixXd fast_tanh(const MatrixXd& z) {
  const Eigen::ArrayXXd e = (2.0 * z.array()).exp();
  return (1.0 - 2.0 / (e + 1.0)).matrix();
}

MatrixXd gather(const PointSet& ps, std::size_t begin, std::size_t end) {
  const std::size_t d = ps.dim();
  MatrixXd x(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(end - begin));
  for (std::size_t i = begin; i < end; ++i) {
    for (std::size_t j = 0; j < d; ++j) x(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i - begin)) = ps(i, j);
  }
  return x;
}

void run_jet_forward(const MlpParams& params, JetTape& tape) {
  const auto B = static_cast<Eigen::Index>(tape.batch);
  const auto D = static_cast<Eigen::Index>(tape.dirs);
  const std::size_t hidden = params.layer_count() - 1;
  tape.a.resize(hidden);
  tape.s1.resize(hidden);
  tape.s2.resize(hidden);
  tape.z1.resize(hidden);
  tape.z2.resize(hidden);
  tape.h1.resize(hidden);
  tape.h2.resize(hidden);

  for (std::size_t l = 0; l < hidden; ++l) {
    const auto& layer = params.layer(l);
    const Eigen::Index w = layer.weight.rows();
    MatrixXd z;
    if (l == 0) {
      z = layer.weight * tape.input;
      tape.z1[l].resize(w, D * B);
      for (Eigen::Index j = 0; j < D; ++j) tape.z1[l].middleCols(j * B, B).colwise() = layer.weight.col(j);
      tape.z2[l] = MatrixXd::Zero(w, D * B);
    } else {
      z = layer.weight * tape.a[l - 1];
      tape.z1[l].noalias() = layer.weight * tape.h1[l - 1];
      tape.z2[l].noalias() = layer.weight * tape.h2[l - 1];
    }
    z.colwise() += layer.bias;
    tape.a[l] = fast_tanh(z);
    tape.s1[l] = 1.0 - tape.a[l].array().square();
    tape.s2[l] = -2.0 * tape.a[l].array() * tape.s1[l].array();
    // The top layer's first-derivative jet never reaches the loss.
    const bool need_h1 = l + 1 < hidden;
    if (need_h1) tape.h1[l].resize(w, D * B);
    tape.h2[l].resize(w, D * B);
    for (Eigen::Index j = 0; j < D; ++j) {
      auto z1j = tape.z1[l].middleCols(j * B, B).array();
      if (need_h1) tape.h1[l].middleCols(j * B, B) = tape.s1[l].array() * z1j;
      tape.h2[l].middleCols(j * B, B) =
          tape.s2[l].array() * z1j.square() + tape.s1[l].array() * tape.z2[l].middleCols(j * B, B).array();
    }
  }

  const auto& out = params.layer(hidden);
  const MatrixXd& top = hidden == 0 ? tape.input : tape.a[hidden - 1];
  tape.u = ((out.weight * top).row(0).array() + out.bias(0)).matrix();
  tape.lap = Eigen::RowVectorXd::Zero(B);
  if (hidden > 0) {
    const Eigen::RowVectorXd second = out.weight * tape.h2[hidden - 1];
    for (Eigen::Index j = 0; j < D; ++j) tape.lap += second.segment(j * B, B);
  }
}

struct LayerGrads {
  std::vector<MatrixXd> weight;
  std::vector<VectorXd> bias;

  explicit LayerGrads(const MlpParams& params) {
    for (std::size_t l = 0; l < params.layer_count(); ++l) {
      weight.push_back(MatrixXd::Zero(params.layer(l).weight.rows(), params.layer(l).weight.cols()));
      bias.push_back(VectorXd::Zero(params.layer(l).bias.size()));
    }
  }

  void add(const LayerGrads& other) {
    for (std::size_t l = 0; l < weight.size(); ++l) {
      weight[l] += other.weight[l];
      bias[l] += other.bias[l];
    }
  }

  VectorXd flatten() const {
    Eigen::Index n = 0;
    for (std::size_t l = 0; l < weight.size(); ++l) n += weight[l].size() + bias[l].size();
    VectorXd flat(n);
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l < weight.size(); ++l) {
      flat.segment(pos, weight[l].size()) = weight[l].reshaped();
      pos += weight[l].size();
      flat.segment(pos, bias[l].size()) = bias[l];
      pos += bias[l].size();
    }
    return flat;
  }
};

// Reverse sweep over the tape. u_bar and lap_bar are dLoss/du and dLoss/dLap per point.
void run_jet_backward(const MlpParams& params, const JetTape& tape, const Eigen::RowVectorXd& u_bar,
                      const Eigen::RowVectorXd& lap_bar, LayerGrads& grads) {
  const auto B = static_cast<Eigen::Index>(tape.batch);
  const auto D = static_cast<Eigen::Index>(tape.dirs);
  const std::size_t hidden = params.layer_count() - 1;

  const auto& out = params.layer(hidden);
  if (hidden == 0) {
    // Linear model: the Laplacian is identically zero.
    grads.weight[0].row(0).noalias() += (tape.input * u_bar.transpose()).transpose();
    grads.bias[0](0) += u_bar.sum();
    return;
  }

  // Output layer: u = W a + b, u'' = W h2; u' does not enter the loss.
  Eigen::RowVectorXd lap_bar_rep(D * B);
  for (Eigen::Index j = 0; j < D; ++j) lap_bar_rep.segment(j * B, B) = lap_bar;
  grads.weight[hidden].row(0).noalias() += u_bar * tape.a[hidden - 1].transpose();
  grads.weight[hidden].row(0).noalias() += lap_bar_rep * tape.h2[hidden - 1].transpose();
  grads.bias[hidden](0) += u_bar.sum();

  MatrixXd h_bar = out.weight.transpose() * u_bar;
  MatrixXd h1_bar;  // empty means zero
  MatrixXd h2_bar = out.weight.transpose() * lap_bar_rep;

  for (std::size_t l = hidden; l-- > 0;) {
    const auto& layer = params.layer(l);
    const Eigen::Index w = layer.weight.rows();
    const auto a = tape.a[l].array();
    const auto s1 = tape.s1[l].array();
    const auto s2 = tape.s2[l].array();
    const Eigen::ArrayXXd s3 = -2.0 * s1.square() + 4.0 * a.square() * s1;

    // h = t(z), h' = s1 z', h'' = s2 z'^2 + s1 z''
    MatrixXd z_bar = (s1 * h_bar.array()).matrix();
    MatrixXd z1_bar(w, D * B);
    MatrixXd z2_bar(w, D * B);
    for (Eigen::Index j = 0; j < D; ++j) {
      const auto z1j = tape.z1[l].middleCols(j * B, B).array();
      const auto z2j = tape.z2[l].middleCols(j * B, B).array();
      const auto h2b = h2_bar.middleCols(j * B, B).array();
      z2_bar.middleCols(j * B, B) = s1 * h2b;
      if (h1_bar.size() > 0) {
        const auto h1b = h1_bar.middleCols(j * B, B).array();
        z1_bar.middleCols(j * B, B) = s1 * h1b + 2.0 * s2 * z1j * h2b;
        z_bar.array() += s2 * z1j * h1b + (s3 * z1j.square() + s2 * z2j) * h2b;
      } else {
        z1_bar.middleCols(j * B, B) = 2.0 * s2 * z1j * h2b;
        z_bar.array() += (s3 * z1j.square() + s2 * z2j) * h2b;
      }
    }

    grads.bias[l] += z_bar.rowwise().sum();
    if (l == 0) {
      // Inputs: x with x' = e_j and x'' = 0.
      grads.weight[0].noalias() += z_bar * tape.input.transpose();
      for (Eigen::Index j = 0; j < D; ++j) grads.weight[0].col(j) += z1_bar.middleCols(j * B, B).rowwise().sum();
      break;
    }
    grads.weight[l].noalias() += z_bar * tape.a[l - 1].transpose();
    grads.weight[l].noalias() += z1_bar * tape.h1[l - 1].transpose();
    grads.weight[l].noalias() += z2_bar * tape.h2[l - 1].transpose();
    h_bar.noalias() = layer.weight.transpose() * z_bar;
    h1_bar.noalias() = layer.weight.transpose() * z1_bar;
    h2_bar.noalias() = layer.weight.transpose() * z2_bar;
  }
}

// Value-only pass storing activations for the boundary term.
struct ValueTape {
  MatrixXd input;
  std::vector<MatrixXd> a;
  Eigen::RowVectorXd u;
};

void run_value_forward(const MlpParams& params, ValueTape& tape) {
  const std::size_t hidden = params.layer_count() - 1;
  tape.a.resize(hidden);
  for (std::size_t l = 0; l < hidden; ++l) {
    const auto& layer = params.layer(l);
    MatrixXd z = layer.weight * (l == 0 ? tape.input : tape.a[l - 1]);
    z.colwise() += layer.bias;
    tape.a[l] = fast_tanh(z);
  }
  const auto& out = params.layer(hidden);
  tape.u = ((out.weight * (hidden == 0 ? tape.input : tape.a[hidden - 1])).row(0).array() + out.bias(0)).matrix();
}

void run_value_backward(const MlpParams& params, const ValueTape& tape, const Eigen::RowVectorXd& u_bar,
                        LayerGrads& grads) {
  const std::size_t hidden = params.layer_count() - 1;
  MatrixXd g = u_bar;  // adjoint of the current layer's output, rows = width
  for (std::size_t l = hidden + 1; l-- > 0;) {
    const MatrixXd& below = l == 0 ? tape.input : tape.a[l - 1];
    grads.weight[l].noalias() += g * below.transpose();
    grads.bias[l] += g.rowwise().sum();
    if (l == 0) break;
    MatrixXd h_bar = params.layer(l).weight.transpose() * g;
    g = (h_bar.array() * (1.0 - tape.a[l - 1].array().square())).matrix();
  }
}

std::size_t chunk_count(std::size_t n) { return (n + kChunk - 1) / kChunk; }

// Tapes are a few hundred KB per matrix. With glibc defaults each one is mmapped and
// returned to the kernel on free, so every step pays page faults for all of them.
void keep_heap_warm() {
#if defined(__GLIBC__)
  static const bool once = [] {
    mallopt(M_MMAP_THRESHOLD, 64 << 20);
    mallopt(M_TRIM_THRESHOLD, 256 << 20);
    return true;
  }();
  (void)once;
#endif
}

}  // namespace

BatchEvaluation evaluate_batch(const MlpParams& params, const PointSet& points) {
  if (points.dim() != params.input_dim()) throw InvalidArgument("evaluate_batch: dimension mismatch");
  keep_heap_warm();
  BatchEvaluation out;
  out.u.resize(points.size());
  out.laplacian.resize(points.size());
  parallel_for(chunk_count(points.size()), [&](std::size_t c) {
    const std::size_t begin = c * kChunk, end = std::min(points.size(), begin + kChunk);
    JetTape tape;
    tape.batch = end - begin;
    tape.dirs = points.dim();
    tape.input = gather(points, begin, end);
    run_jet_forward(params, tape);
    for (std::size_t i = begin; i < end; ++i) {
      out.u[i] = tape.u(static_cast<Eigen::Index>(i - begin));
      out.laplacian[i] = tape.lap(static_cast<Eigen::Index>(i - begin));
    }
  });
  return out;
}

std::vector<double> predict(const MlpParams& params, const PointSet& points) {
  if (points.dim() != params.input_dim()) throw InvalidArgument("predict: dimension mismatch");
  std::vector<double> u(points.size());
  parallel_for(chunk_count(points.size()), [&](std::size_t c) {
    const std::size_t begin = c * kChunk, end = std::min(points.size(), begin + kChunk);
    ValueTape tape;
    tape.input = gather(points, begin, end);
    run_value_forward(params, tape);
    for (std::size_t i = begin; i < end; ++i) u[i] = tape.u(static_cast<Eigen::Index>(i - begin));
  });
  return u;
}

InteriorBatch make_interior_batch(const PdeProblem& problem, PointSet points) {
  if (points.dim() != problem.dim()) throw InvalidArgument("interior batch: dimension mismatch");
  std::vector<double> f(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) f[i] = problem.forcing(points.point(i));
  return {std::move(points), std::move(f)};
}

LossAndGrad loss_and_grad(const MlpParams& params, const InteriorBatch& interior, const BoundaryBatch& boundary,
                          const PdeProblem& problem, double weight_bc) {
  const std::size_t d = params.input_dim();
  if (interior.points.empty()) throw InvalidArgument("loss_and_grad: empty interior batch");
  if (interior.points.dim() != d || problem.dim() != d) throw InvalidArgument("loss_and_grad: dimension mismatch");
  if (interior.forcing.size() != interior.points.size()) throw InvalidArgument("loss_and_grad: forcing size mismatch");
  if (boundary.size() > 0 && (boundary.points.dim() != d || boundary.points.size() != boundary.size())) {
    throw InvalidArgument("loss_and_grad: boundary batch shape mismatch");
  }

  keep_heap_warm();
  const std::size_t n_in = interior.points.size();
  const std::size_t n_bc = boundary.size();
  const std::size_t in_chunks = chunk_count(n_in);
  const std::size_t bc_chunks = chunk_count(n_bc);
  std::vector<LayerGrads> grads(in_chunks + bc_chunks, LayerGrads(params));
  std::vector<double> partial(in_chunks + bc_chunks, 0.0);
  const double inv_in = 1.0 / static_cast<double>(n_in);
  const double bc_scale = n_bc > 0 ? weight_bc / static_cast<double>(n_bc) : 0.0;

  parallel_for(in_chunks + bc_chunks, [&](std::size_t c) {
    if (c < in_chunks) {
      const std::size_t begin = c * kChunk, end = std::min(n_in, begin + kChunk);
      JetTape tape;
      tape.batch = end - begin;
      tape.dirs = d;
      tape.input = gather(interior.points, begin, end);
      run_jet_forward(params, tape);
      const auto B = static_cast<Eigen::Index>(tape.batch);
      Eigen::RowVectorXd u_bar(B), lap_bar(B);
      double sum = 0.0;
      for (Eigen::Index i = 0; i < B; ++i) {
        const double u = tape.u(i);
        const double r = tape.lap(i) + problem.nonlinearity(u) - interior.forcing[begin + static_cast<std::size_t>(i)];
        sum += r * r;
        lap_bar(i) = 2.0 * r * inv_in;
        u_bar(i) = lap_bar(i) * problem.nonlinearity_derivative(u);
      }
      partial[c] = sum * inv_in;
      run_jet_backward(params, tape, u_bar, lap_bar, grads[c]);
    } else {
      const std::size_t begin = (c - in_chunks) * kChunk, end = std::min(n_bc, begin + kChunk);
      ValueTape tape;
      tape.input = gather(boundary.points, begin, end);
      run_value_forward(params, tape);
      const auto B = static_cast<Eigen::Index>(end - begin);
      Eigen::RowVectorXd u_bar(B);
      double sum = 0.0;
      for (Eigen::Index i = 0; i < B; ++i) {
        const double e = tape.u(i) - boundary.values[begin + static_cast<std::size_t>(i)];
        sum += e * e;
        u_bar(i) = 2.0 * e * bc_scale;
      }
      partial[c] = sum * bc_scale;
      run_value_backward(params, tape, u_bar, grads[c]);
    }
  });

  LossAndGrad result;
  for (std::size_t c = 0; c < in_chunks; ++c) result.residual_loss += partial[c];
  for (std::size_t c = in_chunks; c < partial.size(); ++c) result.boundary_loss += partial[c];
  result.loss = result.residual_loss + result.boundary_loss;
  if (weight_bc != 0.0) result.boundary_loss /= weight_bc;
  for (std::size_t c = 1; c < grads.size(); ++c) grads[0].add(grads[c]);
  result.grad = grads[0].flatten();
  return result;
}

LossAndGrad loss_and_grad(const MlpParams& params, const PointSet& interior, const BoundaryBatch& boundary,
                          const PdeProblem& problem, double weight_bc) {
  return loss_and_grad(params, make_interior_batch(problem, interior), boundary, problem, weight_bc);
}

void save_checkpoint(std::ostream& out, const MlpParams& params) {
  nlohmann::json header = {{"widths", params.widths()},
                           {"activation", "tanh"},
                           {"seed", params.seed()},
                           {"parameter_count", params.parameter_count()}};
  out << header.dump() << '\n';
  const VectorXd flat = params.flatten();
  char buf[32];
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", flat(i));
    out << buf << '\n';
  }
}

MlpParams load_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("checkpoint: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("checkpoint: bad header: ") + e.what());
  }
  if (header.value("activation", std::string()) != "tanh") throw InvalidArgument("checkpoint: unsupported activation");
  MlpParams params(header.at("widths").get<std::vector<std::size_t>>(), header.value("seed", std::uint64_t{0}));
  VectorXd flat(static_cast<Eigen::Index>(params.parameter_count()));
  for (Eigen::Index i = 0; i < flat.size(); ++i) {
    if (!(in >> flat(i))) throw InvalidArgument("checkpoint: truncated parameter list");
  }
  params.assign(flat);
  return params;
}

}  // namespace qrpinn
