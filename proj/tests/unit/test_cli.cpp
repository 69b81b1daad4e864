#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "randfeat/cli.hpp"
#include "randfeat/csv.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = randfeat::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("randfeat_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out(const std::string& sub = "") const { return (dir_ / sub).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, BoundsJson) {
  const auto r = run({"bounds", "--n", "8", "--c", "1", "--delta", "0.01", "--lambda-min", "0.1", "--kappa", "10",
                      "--sigma1", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["chernoff"], 5903);
  EXPECT_EQ(j["bernstein"], 12592);
  EXPECT_EQ(j["gaussian"], 8520);
  EXPECT_EQ(j["gaussian_up_to_absolute_constant"], true);
}

TEST_F(CliTest, ArgumentErrorsExitTwo) {
  auto r = run({"bounds", "--n", "8"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--lambda-min"), std::string::npos);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"spectra", "--widths", "10", "--dist", "cauchy"}).code, 2);
  EXPECT_EQ(run({"--config", out("missing.json")}).code, 2);
}

TEST_F(CliTest, NumericFailureWritesJsonRecord) {
  const auto r = run({"bounds", "--n", "8", "--c", "1", "--delta", "0.01", "--lambda-min", "0"});
  EXPECT_EQ(r.code, 1);
  const auto j = json::parse(r.err);
  EXPECT_EQ(j["stage"], "bounds");
  EXPECT_NE(j["message"].get<std::string>().find("lambda_min"), std::string::npos);
  EXPECT_TRUE(j.contains("context"));
}

TEST_F(CliTest, BadSetPopulationIsSingular) {
  ASSERT_EQ(run({"--out", out("gen"), "dataset", "gen", "--kind", "bad-set", "--d", "3"}).code, 0);
  const auto r = run({"--out", out("pop"), "population", "--data", out("gen/dataset.csv"), "--activation", "relu",
                      "--closed-form"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto eig = randfeat::csv::read(out("pop/eigenvalues.csv"));
  ASSERT_EQ(eig.rows.size(), 8u);
  const double lmax = eig.rows.front()[1];
  const double lmin = eig.rows.back()[1];
  EXPECT_LE(lmin, 1e-14 * lmax);
  EXPECT_TRUE(fs::exists(out("pop/kernel.csv")));
  EXPECT_TRUE(fs::exists(out("pop/config.json")));
}

TEST_F(CliTest, CertifyReportsParityCensus) {
  const auto r = run({"certify", "--activation", "wendland0", "--d", "3", "--truncation", "128"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["status"], "EMPIRICALLY_STRICT_PD");
  EXPECT_EQ(j["K"], 128);
  const auto relu = json::parse(run({"certify", "--activation", "relu", "--truncation", "128"}).out);
  EXPECT_EQ(relu["status"], "ODD_PART_POLYNOMIAL");
  EXPECT_EQ(relu["odd_count"], 1);
}

TEST_F(CliTest, TrainWritesTraceAndSummary) {
  const auto r = run({"--out", out(), "train", "--dataset", "uniform", "--n", "15", "--d", "4", "--activation",
                      "wendland0", "--width-mult", "20", "--max-iters", "50000", "--tol", "1e-9"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(out("train_summary.json"));
  const auto j = json::parse(in);
  EXPECT_TRUE(j["converged"].get<bool>());
  EXPECT_LE(j["final_residual"].get<double>(), 1e-9);
  const auto trace = randfeat::csv::read(out("train.csv"));
  EXPECT_EQ(trace.header, (std::vector<std::string>{"k", "residual", "least_norm_gap"}));
  EXPECT_EQ(trace.rows.front()[0], 0.0);
}

TEST_F(CliTest, TrainOnBadSetFailsWithDiagnosis) {
  const auto r = run({"--out", out(), "train", "--dataset", "synthetic2"});
  EXPECT_EQ(r.code, 1);
  const auto j = json::parse(r.err);
  EXPECT_NE(j["message"].get<std::string>().find("eight-point set"), std::string::npos);
}

TEST_F(CliTest, ConfigEchoReproducesRun) {
  ASSERT_EQ(run({"--out", out("a"), "spectra", "--dataset", "uniform", "--n", "12", "--d", "3", "--activation",
                 "wendland0", "--widths", "12", "40", "--trials", "3", "--seed", "9", "--summary"})
                .code,
            0);
  std::ifstream in(out("a/config.json"));
  const auto cfg = json::parse(in);
  EXPECT_EQ(cfg["schema_version"], 1);
  EXPECT_FALSE(cfg["rng_version"].get<std::string>().empty());
  ASSERT_EQ(run({"--out", out("b"), "--threads", "1", "--config", out("a/config.json")}).code, 0);
  for (const auto* f : {"spectra.csv", "spectra_summary.csv"}) {
    std::ifstream a(out(std::string("a/") + f)), b(out(std::string("b/") + f));
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str()) << f;
    EXPECT_FALSE(sa.str().empty());
  }
}

TEST_F(CliTest, Figure1OnSyntheticTwoFlagsReluAndSwish) {
  const auto r = run({"--out", out(), "repro", "figure1", "--dataset", "synthetic2", "--trials", "2",
                      "--width-multiples", "1", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(out("figure1_summary.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "activation,width,median_kappa,q10,q90,singular_fraction");
  int flagged = 0;
  while (std::getline(in, line)) {
    if (line.rfind("relu,", 0) == 0 || line.rfind("swish,", 0) == 0) {
      EXPECT_EQ(line.substr(line.rfind(',') + 1), "1") << line;
      ++flagged;
    }
  }
  EXPECT_EQ(flagged, 4);
}

TEST_F(CliTest, DatasetIngestRoundTrip) {
  fs::create_directories(dir_);
  {
    std::ofstream f(out("raw.csv"));
    f << "a,b,y\n3,4,1\n0,-2,0\n";
  }
  ASSERT_EQ(run({"--out", out("ing"), "dataset", "ingest", "--input", out("raw.csv")}).code, 0);
  const auto t = randfeat::csv::read(out("ing/dataset.csv"));
  EXPECT_EQ(t.header, (std::vector<std::string>{"x_0", "x_1", "y"}));
  EXPECT_DOUBLE_EQ(t.rows[0][0], 0.6);
  EXPECT_DOUBLE_EQ(t.rows[1][1], -1.0);
}

TEST_F(CliTest, JointTrainAndLandweberOutputs) {
  ASSERT_EQ(run({"--out", out("j"), "joint-train", "--n", "30", "--d", "4", "--epochs", "2"}).code, 0);
  const auto j = randfeat::csv::read(out("j/joint_train.csv"));
  EXPECT_EQ(j.header, (std::vector<std::string>{"epoch", "kappa", "loss"}));
  EXPECT_EQ(j.rows.size(), 3u);
  ASSERT_EQ(run({"--out", out("l"), "landweber", "--n", "20", "--d", "4", "--activation", "wendland0", "--ks", "1",
                 "10", "--truncation", "64"})
                .code,
            0);
  const auto f = randfeat::csv::read(out("l/landweber_filters.csv"));
  EXPECT_EQ(f.rows.size(), 40u);
  for (const auto& row : f.rows) {
    EXPECT_GE(row[2], 0.0);
    EXPECT_LE(row[2], 1.0);
  }
  const auto s = randfeat::csv::read(out("l/landweber_spectrum.csv"));
  EXPECT_EQ(s.rows.size(), 20u);
}
