#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qrpinn/lowdisc.h"
#include "qrpinn/mlp.h"
#include "qrpinn/pde_problems.h"
#include "qrpinn/pool_sampler.h"

namespace qrpinn {

enum class SamplerKind { Vanilla, Halton, Sobol };

// Interior/boundary point source, optionally with residual-weighted (RAD) batches.
struct SamplerChoice {
  SamplerKind kind = SamplerKind::Sobol;
  bool rad = false;

  bool operator==(const SamplerChoice&) const = default;
};

// "vanilla", "halton", "sobol", optionally suffixed "+rad"; "rad" alone means vanilla+rad.
std::string to_string(SamplerChoice sampler);
SamplerChoice parse_sampler(std::string_view name);

struct ProblemSpec {
  ProblemKind kind = ProblemKind::Poisson;
  std::size_t dim = 2;
  double alpha = 1.0;  // Poisson only
};

PdeProblem make_problem(const ProblemSpec& spec, std::uint64_t coeff_seed);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  Adam(std::size_t n, AdamConfig cfg);
  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);
  std::size_t steps() const { return t_; }

 private:
  AdamConfig cfg_;
  Eigen::VectorXd m_, v_;
  std::size_t t_ = 0;
};

struct TrainSeeds {
  std::uint64_t params = 0;
  std::uint64_t sampler = 0;
  std::uint64_t coeffs = 0;
};

struct TrainConfig {
  ProblemSpec problem;
  SamplerChoice sampler;
  std::size_t n_r = 1000;
  std::size_t n_bc = 400;
  double n_scale = 10.0;  // low-discrepancy pool size in multiples of n_r
  std::size_t epochs = 20;
  std::size_t iters_per_epoch = 500;
  AdamConfig adam;
  RadConfig rad;
  std::vector<std::size_t> hidden = {50, 50, 50};
  TrainSeeds seeds;
  std::size_t test_points = 10000;
  std::uint64_t test_seed = 0;
  double weight_bc = 1.0;

  std::vector<std::size_t> widths() const;
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
// Missing keys keep their defaults. Throws InvalidArgument on bad values.
TrainConfig train_config_from_json(const nlohmann::json& j);

enum class TrainStatus { Completed, Diverged, Interrupted };
std::string to_string(TrainStatus status);

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double rel_l2 = 0.0;
};

struct TrainReport {
  TrainConfig config;
  TrainStatus status = TrainStatus::Completed;
  std::string message;
  std::vector<EpochRecord> history;
  double final_rel_l2 = 0.0;  // of the returned parameters
  double wall_seconds = 0.0;
  MlpParams params;
  PointSet last_batch;              // interior batch of the final epoch (empty if none ran)
  std::size_t pool_size = 0;        // 0 when the sampler has no fixed pool
  double unsampled_fraction = 0.0;  // pool points never drawn into an interior batch
};

nlohmann::json to_json(const TrainReport& report);

// Fixed evaluation points: uniform random in the domain.
PointSet make_test_set(const PdeProblem& problem, std::size_t n, std::uint64_t seed);

// sqrt(sum (u - u*)^2) / sqrt(sum u*^2). Throws NumericError when u* vanishes on the set.
double evaluate_rel_l2(const MlpParams& params, const PdeProblem& problem, const PointSet& test_set);
double evaluate_rel_l2(std::span<const double> predicted, const PdeProblem& problem, const PointSet& test_set);

// Epoch loop: draw the interior batch with the configured sampler (uniform over the
// domain, uniform over a low-discrepancy pool, or residual-weighted over the pool),
// draw a boundary batch from the same family, run iters_per_epoch Adam steps, record
// mean loss and relative L2. Deterministic given the config. A non-finite loss stops
// training with status Diverged.
TrainReport train(const TrainConfig& cfg);

// Cooperative cancellation checked between Adam steps (used by the CLI's SIGINT handler).
void request_stop();
void clear_stop_request();
bool stop_requested();

// Relative L2 above this counts as a failed run.
inline constexpr double kFailureThreshold = 1e-1;

struct ComparisonCell {
  SamplerChoice sampler;
  std::uint64_t seed = 0;
  double rel_l2 = 0.0;
  TrainStatus status = TrainStatus::Completed;
  bool failed = false;
  std::string note;
};

struct ComparisonRow {
  SamplerChoice sampler;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single run
  std::size_t runs = 0;
  std::size_t failed = 0;
};

struct ComparisonTable {
  std::vector<ComparisonCell> cells;
  std::vector<ComparisonRow> rows;

  // One line per sampler, "mean ± std" in %.2e like the published tables.
  std::string format() const;
};

nlohmann::json to_json(const ComparisonTable& table);

// Trains every (sampler, seed) cell; the seed drives both parameter init and sampling.
// A throwing or diverging cell is recorded as failed and the rest still run.
ComparisonTable compare_samplers(const TrainConfig& base, std::span<const SamplerChoice> samplers,
                                 std::span<const std::uint64_t> seeds);

}  // namespace qrpinn
