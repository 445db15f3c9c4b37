#include "qrpinn/cli.h"

#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "CLI11.hpp"
#include "qrpinn/discrepancy.h"
#include "qrpinn/errors.h"
#include "qrpinn/lowdisc.h"
#include "qrpinn/pool_sampler.h"
#include "qrpinn/quadrature.h"
#include "qrpinn/trainer.h"

namespace qrpinn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

extern "C" void on_sigint(int) { request_stop(); }

// Restores the previous SIGINT disposition on scope exit.
class SigintGuard {
 public:
  SigintGuard() : previous_(std::signal(SIGINT, on_sigint)) { clear_stop_request(); }
  ~SigintGuard() { std::signal(SIGINT, previous_); }
  SigintGuard(const SigintGuard&) = delete;
  SigintGuard& operator=(const SigintGuard&) = delete;

 private:
  void (*previous_)(int);
};

DiscrepancyMethod parse_discrepancy_method(const std::string& name) {
  for (auto m : {DiscrepancyMethod::Exact1D, DiscrepancyMethod::ExactEnumND, DiscrepancyMethod::LowerBoundMC}) {
    if (name == to_string(m)) return m;
  }
  throw InvalidArgument("unknown discrepancy method '" + name + "'");
}

struct Outcome {
  int code = kExitOk;
  std::vector<std::string> outputs;
  bool interrupted = false;
  std::string message;
};

Outcome ok(std::vector<std::string> outputs) {
  Outcome o;
  o.outputs = std::move(outputs);
  return o;
}

// --- subcommand bodies: config in, files out ---

Outcome do_gen(const json& c, const fs::path& dir) {
  GeneratorSpec spec;
  spec.kind = parse_sequence_kind(c.at("kind").get<std::string>());
  spec.dim = c.at("d").get<std::size_t>();
  spec.offset = c.at("offset").get<std::uint64_t>();
  spec.seed = c.at("seed").get<std::uint64_t>();
  const PointSet ps = generate(c.at("n").get<std::size_t>(), spec);
  std::ostringstream csv;
  write_csv(csv, ps);
  write_text(dir / "points.csv", csv.str());
  return ok({"points.csv"});
}

Outcome do_quad(const json& c, const fs::path& dir) {
  const Integrand f = make_integrand(c.at("integrand").get<std::string>(), c.at("d").get<std::size_t>());
  std::vector<QuadMethod> methods;
  for (const auto& m : c.at("methods")) methods.push_back(parse_quad_method(m.get<std::string>()));
  ConvergenceStudyConfig cfg;
  cfg.n_grid = c.at("n_grid").get<std::vector<std::size_t>>();
  cfg.seeds = c.at("seeds").get<std::size_t>();
  cfg.n_scale = c.at("n_scale").get<double>();
  cfg.seed = c.at("seed").get<std::uint64_t>();
  cfg.qmc_offset = c.at("qmc_offset").get<std::uint64_t>();
  const auto curves = convergence_study(f, methods, cfg);

  std::ostringstream csv;
  csv << "method,N,mean_abs_err,std_err,mean_rel_err\n";
  json slopes = json::object();
  for (const auto& curve : curves) {
    const std::string name = to_string(curve.method);
    for (const auto& r : curve.rows) {
      csv << name << ',' << r.n << ',' << fmt(r.mean_abs_err) << ',' << fmt(r.std_err) << ',' << fmt(r.mean_rel_err)
          << '\n';
    }
    slopes[name] = curve.fitted_slope;  // NaN dumps as null
  }
  write_text(dir / "convergence.csv", csv.str());
  write_text(dir / "slopes.json", dump(slopes));
  return ok({"convergence.csv", "slopes.json"});
}

Outcome do_discrepancy(const json& c, const fs::path& dir) {
  GeneratorSpec spec;
  spec.kind = parse_sequence_kind(c.at("kind").get<std::string>());
  spec.dim = c.at("d").get<std::size_t>();
  spec.offset = c.at("offset").get<std::uint64_t>();
  spec.seed = c.at("seed").get<std::uint64_t>();
  const auto grid = c.at("n_grid").get<std::vector<std::size_t>>();
  const std::string method_name = c.at("method").get<std::string>();
  const std::size_t samples = c.at("samples").get<std::size_t>();
  if (grid.empty()) throw InvalidArgument("discrepancy: empty N grid");

  std::size_t n_max = 0;
  for (std::size_t n : grid) {
    if (n == 0) throw InvalidArgument("discrepancy: N must be positive");
    n_max = std::max(n_max, n);
  }
  const PointSet all = generate(n_max, spec);

  std::ostringstream csv;
  csv << "N,dstar,method\n";
  std::vector<std::size_t> fit_n;
  std::vector<double> fit_d;
  for (std::size_t n : grid) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    const PointSet ps = all.subset(idx);
    DiscrepancyReport rep;
    DiscrepancyMethod method;
    if (method_name == "auto") {
      method = spec.dim == 1 ? DiscrepancyMethod::Exact1D
               : (n <= kExactMaxPoints && spec.dim <= kExactMaxDim) ? DiscrepancyMethod::ExactEnumND
                                                                     : DiscrepancyMethod::LowerBoundMC;
    } else {
      method = parse_discrepancy_method(method_name);
    }
    if (method == DiscrepancyMethod::Exact1D) {
      if (spec.dim != 1) throw InvalidArgument("discrepancy: exact1d needs d = 1");
      rep = star_discrepancy_1d(ps.coords());
    } else {
      rep = star_discrepancy_nd(ps, method, samples, spec.seed);
    }
    csv << n << ',' << fmt(rep.value) << ',' << to_string(rep.method) << '\n';
    if (rep.value > 0.0) {
      fit_n.push_back(n);
      fit_d.push_back(rep.value);
    }
  }
  write_text(dir / "discrepancy.csv", csv.str());

  json fit = {{"C", nullptr}, {"eps", nullptr}, {"slope", nullptr}, {"points", fit_n.size()}};
  bool distinct = false;
  for (std::size_t n : fit_n) distinct = distinct || n != fit_n.front();
  if (fit_n.size() >= 2 && distinct) {
    const DiscrepancyRateFit r = fit_discrepancy_rate(fit_n, fit_d);
    fit["C"] = r.c;
    fit["eps"] = r.eps;
    fit["slope"] = r.slope;
  }
  write_text(dir / "fit.json", dump(fit));
  return ok({"discrepancy.csv", "fit.json"});
}

Outcome do_coverage(const json& c, const fs::path& dir) {
  const auto n = c.at("n").get<std::size_t>();
  const auto nb = c.at("nb").get<std::size_t>();
  const auto s = c.at("s").get<std::size_t>();
  const auto trials = c.at("trials").get<std::size_t>();
  const CoverageProbability exact = coverage_probability(n, nb, s);
  json j = {{"n", n}, {"nb", nb}, {"s", s}, {"p_exact", exact.p}, {"p_exact_estimated", exact.estimated}};
  if (trials > 0) {
    const CoverageSimulation sim = simulate_coverage(n, nb, s, trials, c.at("seed").get<std::uint64_t>());
    j["p_sim"] = sim.p;
    j["se"] = sim.standard_error;
    j["trials"] = sim.trials;
  } else {
    j["p_sim"] = nullptr;
    j["se"] = nullptr;
    j["trials"] = 0;
  }
  j["expected_unsampled_fraction"] = expected_unsampled_fraction(n, nb, s);
  write_text(dir / "coverage.json", dump(j));
  return ok({"coverage.json"});
}

Outcome do_train(const json& c, const fs::path& dir) {
  const TrainConfig cfg = train_config_from_json(c);
  const TrainReport rep = train(cfg);

  std::ostringstream hist;
  hist << "epoch,loss,rel_l2\n";
  for (const auto& h : rep.history) hist << h.epoch << ',' << fmt(h.mean_loss) << ',' << fmt(h.rel_l2) << '\n';
  write_text(dir / "history.csv", hist.str());

  std::ostringstream ckpt;
  save_checkpoint(ckpt, rep.params);
  write_text(dir / "checkpoint.txt", ckpt.str());

  json report = to_json(rep);
  report["checkpoint"] = "checkpoint.txt";
  write_text(dir / "report.json", dump(report));

  Outcome o = ok({"report.json", "history.csv", "checkpoint.txt"});
  if (rep.status == TrainStatus::Interrupted) {
    o.code = kExitInterrupted;
    o.interrupted = true;
  } else if (rep.status == TrainStatus::Diverged) {
    o.code = kExitFailure;
  }
  o.message = rep.message;
  return o;
}

Outcome do_compare(const json& c, const fs::path& dir) {
  const TrainConfig base = train_config_from_json(c.at("base"));
  std::vector<SamplerChoice> samplers;
  for (const auto& s : c.at("samplers")) samplers.push_back(parse_sampler(s.get<std::string>()));
  const auto seeds = c.at("seeds").get<std::vector<std::uint64_t>>();
  const ComparisonTable table = compare_samplers(base, samplers, seeds);

  write_text(dir / "table.txt", table.format());
  write_text(dir / "comparison.json", dump(to_json(table)));
  std::ostringstream csv;
  csv << "sampler,seed,rel_l2,status,failed\n";
  for (const auto& cell : table.cells) {
    csv << to_string(cell.sampler) << ',' << cell.seed << ',' << fmt(cell.rel_l2) << ',' << to_string(cell.status)
        << ',' << (cell.failed ? 1 : 0) << '\n';
  }
  write_text(dir / "comparison.csv", csv.str());

  Outcome o = ok({"table.txt", "comparison.json", "comparison.csv"});
  if (stop_requested()) {
    o.code = kExitInterrupted;
    o.interrupted = true;
  }
  return o;
}

json seeds_of(const std::string& sub, const json& c) {
  if (sub == "train") return c.at("seeds");
  if (sub == "compare") return {{"cells", c.at("seeds")}, {"coeffs", c.at("base").at("seeds").at("coeffs")}};
  if (c.contains("seed")) return {{"seed", c.at("seed")}};
  return json::object();
}

// --- argument parsing: flags in, resolved config out ---

struct Parsed {
  std::string subcommand;
  json config;
};

void add_train_overrides(CLI::App* sub, std::string& config_path, std::string& problem, std::size_t& d,
                         double& alpha, std::size_t& epochs, std::size_t& iters, std::size_t& n_r, std::size_t& n_bc) {
  sub->add_option("--config", config_path, "JSON training config (missing keys keep defaults)");
  sub->add_option("--problem", problem, "poisson | allen_cahn | sine_gordon");
  sub->add_option("--d", d, "Spatial dimension");
  sub->add_option("--alpha", alpha, "Poisson width parameter");
  sub->add_option("--epochs", epochs, "Number of resampling epochs");
  sub->add_option("--iters", iters, "Adam steps per epoch");
  sub->add_option("--n-r", n_r, "Interior batch size");
  sub->add_option("--n-bc", n_bc, "Boundary batch size");
}

json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw InvalidArgument("bad JSON in " + path + ": " + e.what());
  }
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  write_text(tmp, contents);
  fs::rename(tmp, path);
}

int execute(const std::string& subcommand, const json& config, const fs::path& out_dir, std::ostream& out,
            std::ostream& err) {
  Outcome (*body)(const json&, const fs::path&) = nullptr;
  if (subcommand == "gen") body = do_gen;
  if (subcommand == "quad") body = do_quad;
  if (subcommand == "discrepancy") body = do_discrepancy;
  if (subcommand == "coverage") body = do_coverage;
  if (subcommand == "train") body = do_train;
  if (subcommand == "compare") body = do_compare;
  if (!body) {
    err << "error: unknown subcommand '" << subcommand << "'\n";
    return kExitUsage;
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    err << "error: cannot create " << out_dir.string() << ": " << ec.message() << "\n";
    return kExitFailure;
  }

  json manifest = {{"subcommand", subcommand}, {"config", config},      {"version", kToolVersion},
                   {"seeds", json::object()},  {"outputs", json::array()}, {"wall_seconds", 0.0},
                   {"status", "incomplete"}};
  const fs::path manifest_path = out_dir / kManifestName;
  const auto t0 = std::chrono::steady_clock::now();
  auto finish = [&](const Outcome& o, const std::string& status) {
    manifest["outputs"] = o.outputs;
    manifest["status"] = status;
    manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.message.empty()) manifest["message"] = o.message;
    write_file_atomic(manifest_path, dump(manifest));
  };

  auto fail = [&](int code, const std::string& what) {
    err << "error: " << what << "\n";
    Outcome failed;
    failed.code = code;
    failed.message = what;
    try {
      finish(failed, "failed");
    } catch (const std::exception&) {
    }
    return code;
  };

  try {
    manifest["seeds"] = seeds_of(subcommand, config);
    write_file_atomic(manifest_path, dump(manifest));
    SigintGuard guard;
    const Outcome o = body(config, out_dir);
    if (o.interrupted) {
      finish(o, "incomplete");
      err << "interrupted; outputs in " << out_dir.string() << " are partial\n";
    } else {
      finish(o, o.code == kExitOk ? "complete" : "failed");
      if (o.code != kExitOk) err << "error: " << (o.message.empty() ? "run failed" : o.message) << "\n";
      for (const auto& f : o.outputs) out << (out_dir / f).string() << "\n";
    }
    return o.code;
  } catch (const InvalidArgument& e) {
    return fail(kExitUsage, e.what());
  } catch (const UnsupportedDimension& e) {
    return fail(kExitUsage, e.what());
  } catch (const CapacityExceeded& e) {
    return fail(kExitUsage, e.what());
  } catch (const Unsupported& e) {
    return fail(kExitUsage, e.what());
  } catch (const json::exception& e) {
    return fail(kExitUsage, std::string("bad config: ") + e.what());
  } catch (const std::exception& e) {
    return fail(kExitFailure, e.what());
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quasi-random sampling for physics-informed neural networks", "qrs"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  Parsed parsed;
  std::string out_dir;

  // gen
  std::string gen_kind = "halton";
  std::size_t gen_d = 0, gen_n = 0;
  std::uint64_t gen_offset = 0, gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Generate a point set as CSV");
  gen->add_option("--kind", gen_kind, "halton | sobol | random")->capture_default_str();
  gen->add_option("--d", gen_d, "Dimension")->required();
  gen->add_option("--n", gen_n, "Number of points")->required();
  gen->add_option("--offset", gen_offset, "First sequence index")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Seed for random points")->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->required();

  // quad
  std::string q_integrand;
  std::size_t q_d = 0, q_seeds = 10;
  std::vector<std::string> q_methods = {"mc", "qmc_halton", "qmc_sobol", "rqmc_halton", "rqmc_sobol"};
  std::vector<std::size_t> q_grid = power_of_two_grid(4, 16);
  double q_n_scale = 10.0;
  std::uint64_t q_seed = 0, q_offset = 0;
  auto* quad = app.add_subcommand("quad", "MC/QMC/RQMC convergence study");
  quad->add_option("--integrand", q_integrand, "f_sin | f_exp")->required();
  quad->add_option("--d", q_d, "Dimension")->required();
  quad->add_option("--methods", q_methods, "Comma-separated methods")->delimiter(',')->capture_default_str();
  quad->add_option("--n-grid", q_grid, "Comma-separated sample sizes")->delimiter(',');
  quad->add_option("--seeds", q_seeds, "Repetitions per N for random methods")->capture_default_str();
  quad->add_option("--n-scale", q_n_scale, "RQMC pool size in multiples of N")->capture_default_str();
  quad->add_option("--seed", q_seed, "Base seed")->capture_default_str();
  quad->add_option("--qmc-offset", q_offset, "First sequence index for QMC/RQMC")->capture_default_str();
  quad->add_option("--out", out_dir, "Output directory")->required();

  // discrepancy
  std::string dc_kind = "halton", dc_method = "auto";
  std::size_t dc_d = 1, dc_samples = 100000;
  std::vector<std::size_t> dc_grid = power_of_two_grid(4, 12);
  std::uint64_t dc_seed = 0, dc_offset = 0;
  auto* disc = app.add_subcommand("discrepancy", "Star discrepancy of sequence prefixes");
  disc->add_option("--kind", dc_kind, "halton | sobol | random")->capture_default_str();
  disc->add_option("--d", dc_d, "Dimension")->capture_default_str();
  disc->add_option("--n-grid", dc_grid, "Comma-separated prefix sizes")->delimiter(',');
  disc->add_option("--method", dc_method, "auto | exact1d | exact_enum | lower_bound_mc")->capture_default_str();
  disc->add_option("--samples", dc_samples, "Corners for lower_bound_mc")->capture_default_str();
  disc->add_option("--seed", dc_seed, "Seed")->capture_default_str();
  disc->add_option("--offset", dc_offset, "First sequence index")->capture_default_str();
  disc->add_option("--out", out_dir, "Output directory")->required();

  // coverage
  std::size_t cv_n = 0, cv_nb = 0, cv_s = 0, cv_trials = 100000;
  std::uint64_t cv_seed = 0;
  auto* cov = app.add_subcommand("coverage", "Probability that s batches cover the pool");
  cov->add_option("--n", cv_n, "Pool size")->required();
  cov->add_option("--nb", cv_nb, "Batch size")->required();
  cov->add_option("--s", cv_s, "Number of epochs")->required();
  cov->add_option("--trials", cv_trials, "Simulation trials (0 to skip)")->capture_default_str();
  cov->add_option("--seed", cv_seed, "Simulation seed")->capture_default_str();
  cov->add_option("--out", out_dir, "Output directory")->required();

  // train
  std::string tr_config, tr_problem, tr_sampler;
  std::size_t tr_d = 0, tr_epochs = 0, tr_iters = 0, tr_nr = 0, tr_nbc = 0;
  double tr_alpha = 0.0;
  std::uint64_t tr_seed = 0;
  auto* tr = app.add_subcommand("train", "Train one PINN");
  add_train_overrides(tr, tr_config, tr_problem, tr_d, tr_alpha, tr_epochs, tr_iters, tr_nr, tr_nbc);
  tr->add_option("--sampler", tr_sampler, "vanilla | halton | sobol, optionally +rad");
  tr->add_option("--seed", tr_seed, "Seed for parameters and sampling");
  tr->add_option("--out", out_dir, "Output directory")->required();

  // compare
  std::string cp_config, cp_problem;
  std::size_t cp_d = 0, cp_epochs = 0, cp_iters = 0, cp_nr = 0, cp_nbc = 0;
  double cp_alpha = 0.0;
  std::vector<std::string> cp_samplers = {"vanilla", "halton", "sobol"};
  std::vector<std::uint64_t> cp_seeds = {0, 1, 2};
  auto* cp = app.add_subcommand("compare", "Train every sampler x seed and tabulate relative L2");
  add_train_overrides(cp, cp_config, cp_problem, cp_d, cp_alpha, cp_epochs, cp_iters, cp_nr, cp_nbc);
  cp->add_option("--samplers", cp_samplers, "Comma-separated samplers")->delimiter(',')->capture_default_str();
  cp->add_option("--seeds", cp_seeds, "Comma-separated seeds")->delimiter(',')->capture_default_str();
  cp->add_option("--out", out_dir, "Output directory")->required();

  // replay
  std::string rp_manifest;
  auto* rp = app.add_subcommand("replay", "Re-run a manifest");
  rp->add_option("--manifest", rp_manifest, "Path to manifest.json")->required();
  rp->add_option("--out", out_dir, "Output directory (default: the manifest's directory)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  auto resolved_train = [&](CLI::App* sub, const std::string& config_path, const std::string& problem,
                            std::size_t d, double alpha, std::size_t epochs, std::size_t iters, std::size_t n_r,
                            std::size_t n_bc) {
    json j = config_path.empty() ? json::object() : load_json_file(config_path);
    TrainConfig cfg = train_config_from_json(j);
    if (sub->count("--problem")) cfg.problem.kind = parse_problem_kind(problem);
    if (sub->count("--d")) cfg.problem.dim = d;
    if (sub->count("--alpha")) cfg.problem.alpha = alpha;
    if (sub->count("--epochs")) cfg.epochs = epochs;
    if (sub->count("--iters")) cfg.iters_per_epoch = iters;
    if (sub->count("--n-r")) cfg.n_r = n_r;
    if (sub->count("--n-bc")) cfg.n_bc = n_bc;
    return cfg;
  };

  try {
    if (*gen) {
      parsed = {"gen", {{"kind", gen_kind}, {"d", gen_d}, {"n", gen_n}, {"offset", gen_offset}, {"seed", gen_seed}}};
    } else if (*quad) {
      parsed = {"quad",
                {{"integrand", q_integrand},
                 {"d", q_d},
                 {"methods", q_methods},
                 {"n_grid", q_grid},
                 {"seeds", q_seeds},
                 {"n_scale", q_n_scale},
                 {"seed", q_seed},
                 {"qmc_offset", q_offset}}};
    } else if (*disc) {
      parsed = {"discrepancy",
                {{"kind", dc_kind},
                 {"d", dc_d},
                 {"n_grid", dc_grid},
                 {"method", dc_method},
                 {"samples", dc_samples},
                 {"seed", dc_seed},
                 {"offset", dc_offset}}};
    } else if (*cov) {
      parsed = {"coverage", {{"n", cv_n}, {"nb", cv_nb}, {"s", cv_s}, {"trials", cv_trials}, {"seed", cv_seed}}};
    } else if (*tr) {
      TrainConfig cfg = resolved_train(tr, tr_config, tr_problem, tr_d, tr_alpha, tr_epochs, tr_iters, tr_nr, tr_nbc);
      if (tr->count("--sampler")) cfg.sampler = parse_sampler(tr_sampler);
      if (tr->count("--seed")) cfg.seeds.params = cfg.seeds.sampler = tr_seed;
      cfg.validate();
      parsed = {"train", to_json(cfg)};
    } else if (*cp) {
      TrainConfig cfg = resolved_train(cp, cp_config, cp_problem, cp_d, cp_alpha, cp_epochs, cp_iters, cp_nr, cp_nbc);
      cfg.validate();
      json samplers = json::array();
      for (const auto& s : cp_samplers) samplers.push_back(to_string(parse_sampler(s)));
      parsed = {"compare", {{"base", to_json(cfg)}, {"samplers", samplers}, {"seeds", cp_seeds}}};
    } else if (*rp) {
      const json m = load_json_file(rp_manifest);
      if (!m.contains("subcommand") || !m.contains("config")) throw InvalidArgument(rp_manifest + ": not a manifest");
      parsed = {m.at("subcommand").get<std::string>(), m.at("config")};
      if (out_dir.empty()) out_dir = fs::path(rp_manifest).parent_path().string();
      if (out_dir.empty()) out_dir = ".";
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const json::exception& e) {
    err << "error: bad config: " << e.what() << "\n";
    return kExitUsage;
  }
  return execute(parsed.subcommand, parsed.config, out_dir, out, err);
}

}  // namespace qrpinn::cli
