#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qrpinn/cli.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qrpinn;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / ("qrs_cli_" + std::string(info->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  int qrs(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  std::string dir(const std::string& name) const { return (root_ / name).string(); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  static json read_json(const fs::path& p) { return json::parse(slurp(p)); }

  std::string write_config(const json& j) const {
    const fs::path p = root_ / "config.json";
    std::ofstream(p) << j.dump();
    return p.string();
  }

  static std::set<std::string> listing(const fs::path& d) {
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(d)) names.insert(e.path().filename().string());
    return names;
  }

  fs::path root_;
  std::ostringstream out_, err_;
};

json small_train_config() {
  return {{"problem", {{"problem", "poisson"}, {"d", 2}, {"alpha", 1.0}}},
          {"n_r", 40},
          {"n_bc", 20},
          {"epochs", 2},
          {"iters_per_epoch", 3},
          {"hidden", {6, 6}},
          {"test_points", 200}};
}

}  // namespace

TEST_F(CliTest, GenWritesHaltonPointsAndIsIdempotent) {
  ASSERT_EQ(qrs({"gen", "--kind", "halton", "--d", "2", "--n", "3", "--out", dir("g")}), cli::kExitOk);
  const std::string csv = slurp(root_ / "g" / "points.csv");
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header, "i,x1,x2");
  std::vector<std::string> rows;
  while (std::getline(lines, row)) rows.push_back(row);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].substr(0, 2), "1,");
  double a = 0, b = 0;
  std::sscanf(rows[1].c_str(), "1,%lf,%lf", &a, &b);
  EXPECT_DOUBLE_EQ(a, 0.5);
  EXPECT_DOUBLE_EQ(b, 1.0 / 3.0);

  const json m = read_json(root_ / "g" / "manifest.json");
  EXPECT_EQ(m["subcommand"], "gen");
  EXPECT_EQ(m["status"], "complete");
  EXPECT_EQ(m["version"], cli::kToolVersion);

  ASSERT_EQ(qrs({"gen", "--kind", "halton", "--d", "2", "--n", "3", "--out", dir("g")}), cli::kExitOk);
  EXPECT_EQ(slurp(root_ / "g" / "points.csv"), csv);
  EXPECT_EQ(listing(root_ / "g"), (std::set<std::string>{"points.csv", "manifest.json"}));
}

TEST_F(CliTest, GenWithZeroPointsWritesHeaderOnly) {
  ASSERT_EQ(qrs({"gen", "--kind", "sobol", "--d", "3", "--n", "0", "--out", dir("z")}), cli::kExitOk);
  EXPECT_EQ(slurp(root_ / "z" / "points.csv"), "i,x1,x2,x3\n");
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(qrs({"gen", "--d", "2", "--out", dir("u")}), cli::kExitUsage);  // missing --n
  EXPECT_EQ(qrs({}), cli::kExitUsage);
  EXPECT_EQ(qrs({"bogus"}), cli::kExitUsage);
  EXPECT_EQ(qrs({"quad", "--integrand", "f_cos", "--d", "2", "--out", dir("q")}), cli::kExitUsage);
  EXPECT_EQ(read_json(root_ / "q" / "manifest.json")["status"], "failed");
  EXPECT_EQ(qrs({"gen", "--kind", "sobol", "--d", "5000", "--n", "2", "--out", dir("s")}), cli::kExitUsage);
  EXPECT_EQ(qrs({"--help"}), cli::kExitOk);
  EXPECT_NE(out_.str().find("quad"), std::string::npos);
}

TEST_F(CliTest, QuadSingleSampleSizeHasNullSlopes) {
  ASSERT_EQ(qrs({"quad", "--integrand", "f_exp", "--d", "2", "--methods", "mc,qmc_sobol", "--n-grid", "64",
                 "--seeds", "3", "--out", dir("q")}),
            cli::kExitOk);
  const json slopes = read_json(root_ / "q" / "slopes.json");
  EXPECT_TRUE(slopes["mc"].is_null());
  EXPECT_TRUE(slopes["qmc_sobol"].is_null());
  const std::string csv = slurp(root_ / "q" / "convergence.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,N,mean_abs_err,std_err,mean_rel_err");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST_F(CliTest, QuadSlopesOnGrid) {
  ASSERT_EQ(qrs({"quad", "--integrand", "f_exp", "--d", "2", "--methods", "mc,qmc_halton", "--n-grid",
                 "64,256,1024,4096", "--out", dir("q")}),
            cli::kExitOk);
  const json slopes = read_json(root_ / "q" / "slopes.json");
  EXPECT_LT(slopes["qmc_halton"].get<double>(), -0.8);
  EXPECT_GT(slopes["mc"].get<double>(), -0.75);
}

TEST_F(CliTest, DiscrepancyAndCoverage) {
  ASSERT_EQ(qrs({"discrepancy", "--kind", "halton", "--d", "1", "--n-grid", "16,64,256", "--out", dir("d")}),
            cli::kExitOk);
  const json fit = read_json(root_ / "d" / "fit.json");
  EXPECT_GT(fit["C"].get<double>(), 0.0);
  EXPECT_NE(slurp(root_ / "d" / "discrepancy.csv").find("16,0.0625,exact1d"), std::string::npos);

  ASSERT_EQ(qrs({"coverage", "--n", "2", "--nb", "1", "--s", "2", "--trials", "1000", "--out", dir("c")}),
            cli::kExitOk);
  const json c = read_json(root_ / "c" / "coverage.json");
  EXPECT_EQ(c["p_exact"].get<double>(), 0.5);
  EXPECT_FALSE(c["p_exact_estimated"].get<bool>());
  EXPECT_NEAR(c["p_sim"].get<double>(), 0.5, 0.06);
}

TEST_F(CliTest, TrainZeroEpochsAndReplay) {
  json cfg = small_train_config();
  cfg["epochs"] = 0;
  ASSERT_EQ(qrs({"train", "--config", write_config(cfg), "--sampler", "halton", "--out", dir("t0")}),
            cli::kExitOk);
  EXPECT_EQ(slurp(root_ / "t0" / "history.csv"), "epoch,loss,rel_l2\n");

  ASSERT_EQ(qrs({"train", "--config", write_config(small_train_config()), "--sampler", "sobol+rad", "--seed", "4",
                 "--out", dir("t")}),
            cli::kExitOk);
  const json report = read_json(root_ / "t" / "report.json");
  const std::string checkpoint = slurp(root_ / "t" / "checkpoint.txt");
  const std::string history = slurp(root_ / "t" / "history.csv");
  const json m = read_json(root_ / "t" / "manifest.json");
  EXPECT_EQ(m["status"], "complete");
  EXPECT_EQ(m["config"]["sampler"], "sobol+rad");
  EXPECT_EQ(m["config"]["seeds"]["params"], 4);
  EXPECT_EQ(listing(root_ / "t"),
            (std::set<std::string>{"manifest.json", "history.csv", "checkpoint.txt", "report.json"}));

  ASSERT_EQ(qrs({"replay", "--manifest", (root_ / "t" / "manifest.json").string(), "--out", dir("r")}),
            cli::kExitOk);
  EXPECT_EQ(slurp(root_ / "r" / "checkpoint.txt"), checkpoint);
  EXPECT_EQ(slurp(root_ / "r" / "history.csv"), history);
  json replayed = read_json(root_ / "r" / "report.json");
  EXPECT_EQ(replayed["final_rel_l2"], report["final_rel_l2"]);
}

TEST_F(CliTest, CompareRecordsFailedCellAndContinues) {
  json cfg = small_train_config();
  cfg["adam"] = {{"lr", 1e300}};
  ASSERT_EQ(qrs({"compare", "--config", write_config(cfg), "--samplers", "vanilla,sobol", "--seeds", "0", "--out",
                 dir("cmp")}),
            cli::kExitOk);
  const std::string csv = slurp(root_ / "cmp" / "comparison.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "sampler,seed,rel_l2,status,failed");
  EXPECT_NE(csv.find("vanilla,0"), std::string::npos);
  EXPECT_NE(csv.find("sobol,0"), std::string::npos);
  const json table = read_json(root_ / "cmp" / "comparison.json");
  EXPECT_FALSE(slurp(root_ / "cmp" / "table.txt").empty());
  EXPECT_EQ(read_json(root_ / "cmp" / "manifest.json")["status"], "complete");
  EXPECT_NE(table.dump().find("diverged"), std::string::npos);
}

TEST_F(CliTest, NothingWrittenOutsideOutputDirectory) {
  const auto before = listing(root_);
  ASSERT_EQ(qrs({"coverage", "--n", "10", "--nb", "3", "--s", "4", "--trials", "100", "--out", dir("only")}),
            cli::kExitOk);
  auto after = listing(root_);
  after.erase("only");
  EXPECT_EQ(after, before);
  EXPECT_EQ(listing(root_ / "only"), (std::set<std::string>{"coverage.json", "manifest.json"}));
}
