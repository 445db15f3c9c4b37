#include "qrpinn/trainer.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "qrpinn/errors.h"
#include "qrpinn/rng.h"

namespace qrpinn {

std::string to_string(SamplerChoice sampler) {
  std::string base;
  switch (sampler.kind) {
    case SamplerKind::Vanilla:
      base = "vanilla";
      break;
    case SamplerKind::Halton:
      base = "halton";
      break;
    case SamplerKind::Sobol:
      base = "sobol";
      break;
  }
  return sampler.rad ? base + "+rad" : base;
}

SamplerChoice parse_sampler(std::string_view name) {
  if (name == "rad") return {SamplerKind::Vanilla, true};
  SamplerChoice choice;
  constexpr std::string_view suffix = "+rad";
  if (name.size() > suffix.size() && name.substr(name.size() - suffix.size()) == suffix) {
    choice.rad = true;
    name.remove_suffix(suffix.size());
  }
  if (name == "vanilla" || name == "random") {
    choice.kind = SamplerKind::Vanilla;
  } else if (name == "halton") {
    choice.kind = SamplerKind::Halton;
  } else if (name == "sobol") {
    choice.kind = SamplerKind::Sobol;
  } else {
    throw InvalidArgument("unknown sampler '" + std::string(name) + "'");
  }
  return choice;
}

PdeProblem make_problem(const ProblemSpec& spec, std::uint64_t coeff_seed) {
  switch (spec.kind) {
    case ProblemKind::Poisson:
      return poisson_problem(spec.dim, spec.alpha);
    case ProblemKind::AllenCahn:
      return allen_cahn_problem(spec.dim, coeff_seed);
    case ProblemKind::SineGordon:
      return sine_gordon_problem(spec.dim, coeff_seed);
  }
  throw InvalidArgument("make_problem: unknown kind");
}

Adam::Adam(std::size_t n, AdamConfig cfg)
    : cfg_(cfg), m_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))), v_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n))) {}

void Adam::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
  if (grad.size() != m_.size() || params.size() != m_.size()) throw InvalidArgument("Adam::step: size mismatch");
  ++t_;
  m_ = cfg_.beta1 * m_ + (1.0 - cfg_.beta1) * grad;
  v_ = cfg_.beta2 * v_ + (1.0 - cfg_.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  params.array() -= cfg_.lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + cfg_.eps);
}

std::vector<std::size_t> TrainConfig::widths() const {
  std::vector<std::size_t> w{problem.dim};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(1);
  return w;
}

void TrainConfig::validate() const {
  if (problem.dim == 0) throw InvalidArgument("train config: problem dimension must be >= 1");
  if (n_r == 0) throw InvalidArgument("train config: n_r must be >= 1");
  if (!(n_scale >= 1.0)) throw InvalidArgument("train config: n_scale must be >= 1");
  if (iters_per_epoch == 0) throw InvalidArgument("train config: iters_per_epoch must be >= 1");
  if (test_points == 0) throw InvalidArgument("train config: test_points must be >= 1");
  if (!(adam.lr > 0.0) || !(adam.eps > 0.0) || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
      !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw InvalidArgument("train config: invalid Adam settings");
  }
  if (!(weight_bc >= 0.0)) throw InvalidArgument("train config: weight_bc must be >= 0");
  for (std::size_t w : hidden) {
    if (w == 0) throw InvalidArgument("train config: hidden widths must be >= 1");
  }
  rad.validate();
}

nlohmann::json to_json(const TrainConfig& cfg) {
  nlohmann::json problem = {{"problem", to_string(cfg.problem.kind)}, {"d", cfg.problem.dim}};
  if (cfg.problem.kind == ProblemKind::Poisson) problem["alpha"] = cfg.problem.alpha;
  return {{"problem", problem},
          {"sampler", to_string(cfg.sampler)},
          {"n_r", cfg.n_r},
          {"n_bc", cfg.n_bc},
          {"n_scale", cfg.n_scale},
          {"epochs", cfg.epochs},
          {"iters_per_epoch", cfg.iters_per_epoch},
          {"adam", {{"lr", cfg.adam.lr}, {"beta1", cfg.adam.beta1}, {"beta2", cfg.adam.beta2}, {"eps", cfg.adam.eps}}},
          {"rad", {{"k", cfg.rad.k_exp}, {"c", cfg.rad.c_add}, {"pool_factor", cfg.rad.pool_factor}}},
          {"hidden", cfg.hidden},
          {"seeds", {{"params", cfg.seeds.params}, {"sampler", cfg.seeds.sampler}, {"coeffs", cfg.seeds.coeffs}}},
          {"test_points", cfg.test_points},
          {"test_seed", cfg.test_seed},
          {"weight_bc", cfg.weight_bc}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig cfg;
  try {
    if (j.contains("problem")) {
      const auto& p = j.at("problem");
      cfg.problem.kind = parse_problem_kind(p.at("problem").get<std::string>());
      cfg.problem.dim = p.value("d", cfg.problem.dim);
      cfg.problem.alpha = p.value("alpha", cfg.problem.alpha);
      if (p.contains("coeff_seed")) cfg.seeds.coeffs = p.at("coeff_seed").get<std::uint64_t>();
    }
    if (j.contains("sampler")) cfg.sampler = parse_sampler(j.at("sampler").get<std::string>());
    if (j.value("use_rad", false)) cfg.sampler.rad = true;
    cfg.n_r = j.value("n_r", cfg.n_r);
    cfg.n_bc = j.value("n_bc", cfg.n_bc);
    cfg.n_scale = j.value("n_scale", cfg.n_scale);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.iters_per_epoch = j.value("iters_per_epoch", cfg.iters_per_epoch);
    if (j.contains("adam")) {
      const auto& a = j.at("adam");
      cfg.adam.lr = a.value("lr", cfg.adam.lr);
      cfg.adam.beta1 = a.value("beta1", cfg.adam.beta1);
      cfg.adam.beta2 = a.value("beta2", cfg.adam.beta2);
      cfg.adam.eps = a.value("eps", cfg.adam.eps);
    }
    if (j.contains("rad")) {
      const auto& r = j.at("rad");
      cfg.rad.k_exp = r.value("k", cfg.rad.k_exp);
      cfg.rad.c_add = r.value("c", cfg.rad.c_add);
      cfg.rad.pool_factor = r.value("pool_factor", cfg.rad.pool_factor);
    }
    if (j.contains("hidden")) cfg.hidden = j.at("hidden").get<std::vector<std::size_t>>();
    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      cfg.seeds.params = s.value("params", cfg.seeds.params);
      cfg.seeds.sampler = s.value("sampler", cfg.seeds.sampler);
      cfg.seeds.coeffs = s.value("coeffs", cfg.seeds.coeffs);
    }
    cfg.test_points = j.value("test_points", cfg.test_points);
    cfg.test_seed = j.value("test_seed", cfg.test_seed);
    cfg.weight_bc = j.value("weight_bc", cfg.weight_bc);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("train config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string to_string(TrainStatus status) {
  switch (status) {
    case TrainStatus::Completed:
      return "completed";
    case TrainStatus::Diverged:
      return "diverged";
    case TrainStatus::Interrupted:
      return "interrupted";
  }
  return "unknown";
}

namespace {

// NaN/inf are not representable in JSON; report them as null.
nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::atomic<bool> g_stop{false};

PointSet to_domain(const PdeProblem& problem, const PointSet& unit) {
  const std::vector<double> lo(problem.dim(), problem.lower()), hi(problem.dim(), problem.upper());
  return scale_to_box(unit, lo, hi);
}

// Stream roles for derive_seed so every random draw of an epoch is independent.
enum Role : std::uint64_t { kInterior = 0, kRadPool = 1, kBoundary = 2, kBoundarySource = 3 };

std::uint64_t epoch_seed(std::uint64_t seed, std::size_t epoch, Role role) {
  return derive_seed(seed, static_cast<std::uint64_t>(epoch) * 8 + role);
}

}  // namespace

nlohmann::json to_json(const TrainReport& report) {
  nlohmann::json history = nlohmann::json::array();
  for (const auto& rec : report.history) {
    history.push_back({{"epoch", rec.epoch}, {"loss", number_or_null(rec.mean_loss)}, {"rel_l2", number_or_null(rec.rel_l2)}});
  }
  return {{"config", to_json(report.config)},
          {"status", to_string(report.status)},
          {"message", report.message},
          {"history", history},
          {"final_rel_l2", number_or_null(report.final_rel_l2)},
          {"wall_seconds", report.wall_seconds},
          {"pool_size", report.pool_size},
          {"unsampled_fraction", report.unsampled_fraction}};
}

PointSet make_test_set(const PdeProblem& problem, std::size_t n, std::uint64_t seed) {
  return to_domain(problem, uniform_random(n, {SequenceKind::UniformRandom, problem.dim(), seed, 0}));
}

double evaluate_rel_l2(std::span<const double> predicted, const PdeProblem& problem, const PointSet& test_set) {
  if (test_set.empty()) throw InvalidArgument("evaluate_rel_l2: empty test set");
  if (predicted.size() != test_set.size()) throw InvalidArgument("evaluate_rel_l2: prediction count mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const double exact = problem.exact(test_set.point(i));
    num += (predicted[i] - exact) * (predicted[i] - exact);
    den += exact * exact;
  }
  if (den == 0.0) throw NumericError("evaluate_rel_l2: exact solution vanishes on the test set");
  return std::sqrt(num) / std::sqrt(den);
}

double evaluate_rel_l2(const MlpParams& params, const PdeProblem& problem, const PointSet& test_set) {
  return evaluate_rel_l2(predict(params, test_set), problem, test_set);
}

void request_stop() { g_stop.store(true); }
void clear_stop_request() { g_stop.store(false); }
bool stop_requested() { return g_stop.load(); }

TrainReport train(const TrainConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const PdeProblem problem = make_problem(cfg.problem, cfg.seeds.coeffs);
  const std::size_t d = problem.dim();

  TrainReport report;
  report.config = cfg;
  report.params = init_params(cfg.widths(), cfg.seeds.params);
  const PointSet test_set = make_test_set(problem, cfg.test_points, cfg.test_seed);

  const bool low_discrepancy = cfg.sampler.kind != SamplerKind::Vanilla;
  const SequenceKind sequence = cfg.sampler.kind == SamplerKind::Halton ? SequenceKind::Halton
                                : cfg.sampler.kind == SamplerKind::Sobol ? SequenceKind::Sobol
                                                                           : SequenceKind::UniformRandom;
  Pool pool;
  std::vector<char> drawn;
  if (low_discrepancy) {
    const auto pool_size =
        std::max(cfg.n_r, static_cast<std::size_t>(std::llround(cfg.n_scale * static_cast<double>(cfg.n_r))));
    pool = Pool(to_domain(problem, generate(pool_size, {sequence, d, 0, 0})), cfg.n_scale);
    drawn.assign(pool.size(), 0);
    report.pool_size = pool.size();
  }
  const GeneratorSpec boundary_source{sequence, d, derive_seed(cfg.seeds.sampler, kBoundarySource), 0};

  Eigen::VectorXd flat = report.params.flatten();
  Adam adam(static_cast<std::size_t>(flat.size()), cfg.adam);

  auto residuals_on = [&](const PointSet& pts) {
    const auto eval = evaluate_batch(report.params, pts);
    std::vector<double> r(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) r[i] = residual(problem, eval.u[i], eval.laplacian[i], pts.point(i));
    return r;
  };

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const std::uint64_t interior_seed = epoch_seed(cfg.seeds.sampler, epoch, kInterior);
    PointSet interior;
    if (low_discrepancy) {
      std::vector<std::size_t> idx;
      if (cfg.sampler.rad && epoch > 0) {
        pool.set_residuals(residuals_on(pool.points()));
        idx = weighted_batch_indices(rad_weights(pool.residuals(), cfg.rad), cfg.n_r, interior_seed);
      } else {
        idx = uniform_batch_indices(pool.size(), cfg.n_r, interior_seed);
      }
      for (std::size_t i : idx) drawn[i] = 1;
      interior = pool.points().subset(idx);
    } else if (cfg.sampler.rad && epoch > 0) {
      // Dense random candidate set regenerated every epoch.
      const auto dense_size = std::max(
          cfg.n_r, static_cast<std::size_t>(std::llround(cfg.rad.pool_factor * static_cast<double>(cfg.n_r))));
      Pool dense(to_domain(problem, uniform_random(dense_size, {SequenceKind::UniformRandom, d,
                                                                epoch_seed(cfg.seeds.sampler, epoch, kRadPool), 0})),
                 cfg.rad.pool_factor);
      dense.set_residuals(residuals_on(dense.points()));
      interior = draw_rad_batch(dense, cfg.n_r, cfg.rad, interior_seed);
    } else {
      interior = to_domain(problem, uniform_random(cfg.n_r, {SequenceKind::UniformRandom, d, interior_seed, 0}));
    }

    BoundaryBatch boundary;
    if (cfg.n_bc > 0) {
      boundary = sample_boundary(problem, cfg.n_bc, boundary_source, epoch_seed(cfg.seeds.sampler, epoch, kBoundary),
                                 cfg.n_scale);
    }
    const InteriorBatch batch = make_interior_batch(problem, interior);
    report.last_batch = interior;

    double loss_sum = 0.0;
    for (std::size_t it = 0; it < cfg.iters_per_epoch; ++it) {
      if (stop_requested()) {
        report.status = TrainStatus::Interrupted;
        report.message = "interrupted during epoch " + std::to_string(epoch + 1);
        break;
      }
      const LossAndGrad lg = loss_and_grad(report.params, batch, boundary, problem, cfg.weight_bc);
      if (!std::isfinite(lg.loss) || !lg.grad.allFinite()) {
        report.status = TrainStatus::Diverged;
        report.message = "non-finite loss at epoch " + std::to_string(epoch + 1) + ", iteration " + std::to_string(it + 1);
        break;
      }
      loss_sum += lg.loss;
      adam.step(flat, lg.grad);
      report.params.assign(flat);
    }
    if (report.status != TrainStatus::Completed) break;
    const double rel = evaluate_rel_l2(report.params, problem, test_set);
    report.history.push_back({epoch + 1, loss_sum / static_cast<double>(cfg.iters_per_epoch), rel});
    if (!std::isfinite(rel)) {
      report.status = TrainStatus::Diverged;
      report.message = "non-finite prediction after epoch " + std::to_string(epoch + 1);
      break;
    }
  }

  report.final_rel_l2 = report.params.all_finite() ? evaluate_rel_l2(report.params, problem, test_set)
                                                    : std::numeric_limits<double>::quiet_NaN();
  if (!drawn.empty()) {
    std::size_t never = 0;
    for (char c : drawn) never += c == 0;
    report.unsampled_fraction = static_cast<double>(never) / static_cast<double>(drawn.size());
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string ComparisonTable::format() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %-24s %5s %7s\n", "sampler", "rel_l2 (mean ± std)", "runs", "failed");
  out << line;
  for (const auto& row : rows) {
    char cell[64];
    if (std::isfinite(row.mean)) {
      std::snprintf(cell, sizeof cell, "%.2e ± %.2e", row.mean, row.std);
    } else {
      std::snprintf(cell, sizeof cell, "-");
    }
    std::snprintf(line, sizeof line, "%-14s %-24s %5zu %7zu\n", to_string(row.sampler).c_str(), cell, row.runs, row.failed);
    out << line;
  }
  return out.str();
}

nlohmann::json to_json(const ComparisonTable& table) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : table.cells) {
    cells.push_back({{"sampler", to_string(c.sampler)},
                     {"seed", c.seed},
                     {"rel_l2", number_or_null(c.rel_l2)},
                     {"status", to_string(c.status)},
                     {"failed", c.failed},
                     {"note", c.note}});
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"sampler", to_string(r.sampler)},
                    {"mean", number_or_null(r.mean)},
                    {"std", number_or_null(r.std)},
                    {"runs", r.runs},
                    {"failed", r.failed}});
  }
  return {{"cells", cells}, {"rows", rows}, {"failure_threshold", kFailureThreshold}};
}

ComparisonTable compare_samplers(const TrainConfig& base, std::span<const SamplerChoice> samplers,
                                 std::span<const std::uint64_t> seeds) {
  if (samplers.empty() || seeds.empty()) throw InvalidArgument("compare_samplers: need at least one sampler and seed");
  ComparisonTable table;
  for (const SamplerChoice& sampler : samplers) {
    ComparisonRow row;
    row.sampler = sampler;
    std::vector<double> finite;
    for (std::uint64_t seed : seeds) {
      ComparisonCell cell;
      cell.sampler = sampler;
      cell.seed = seed;
      TrainConfig cfg = base;
      cfg.sampler = sampler;
      cfg.seeds.params = seed;
      cfg.seeds.sampler = seed;
      try {
        const TrainReport rep = train(cfg);
        cell.rel_l2 = rep.final_rel_l2;
        cell.status = rep.status;
        cell.note = rep.message;
      } catch (const std::exception& e) {
        cell.rel_l2 = std::numeric_limits<double>::quiet_NaN();
        cell.status = TrainStatus::Diverged;
        cell.note = e.what();
      }
      cell.failed = cell.status != TrainStatus::Completed || !(cell.rel_l2 <= kFailureThreshold);
      if (std::isfinite(cell.rel_l2)) finite.push_back(cell.rel_l2);
      row.runs += 1;
      row.failed += cell.failed;
      table.cells.push_back(cell);
    }
    if (finite.empty()) {
      row.mean = row.std = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double v : finite) sum += v;
      row.mean = sum / static_cast<double>(finite.size());
      double var = 0.0;
      for (double v : finite) var += (v - row.mean) * (v - row.mean);
      row.std = finite.size() > 1 ? std::sqrt(var / static_cast<double>(finite.size() - 1)) : 0.0;
    }
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace qrpinn
