// SPDX-License-Identifier: Apache-2.0
// Black-box tests: run the built executable and inspect exit codes and files.
#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <regex>

#include "mmwpl/dataset.hpp"
#include "mmwpl/report.hpp"
#include "support.hpp"

using namespace mmwpl;

namespace {

struct Exec {
  int code;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

// Runs the CLI with arguments; env is an optional "NAME=value" prefix.
Exec run_bin(const test::ScratchDir& dir, const std::vector<std::string>& args, const std::string& env = "") {
  std::string cmd = env.empty() ? "" : env + " ";
  cmd += quote(MMWPL_CLI_PATH);
  for (const auto& a : args) cmd += " " + quote(a);
  const std::string out = dir / ".stdout", err = dir / ".stderr";
  cmd += " >" + quote(out) + " 2>" + quote(err);
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, test::slurp(out), test::slurp(err)};
}

std::vector<std::string> minimal_sim(const std::string& out) {
  return {"simulate", "--out", out,  "--seasons", "Winter", "--freqs", "7.125", "--dist-min", "10",
          "--dist-max", "10", "--dist-steps", "1", "--drops", "1", "--paths-min", "1", "--paths-max", "1"};
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

// ------------------------------------------------------------ general ----

TEST(Cli, HelpAndVersion) {
  test::ScratchDir dir("cli-help");
  auto r = run_bin(dir, {"--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* sub : {"simulate", "train", "report", "pathloss"}) EXPECT_NE(r.out.find(sub), std::string::npos);
  r = run_bin(dir, {"--version"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, UsageErrorsExitTwo) {
  test::ScratchDir dir("cli-usage");
  EXPECT_EQ(run_bin(dir, {}).code, 2);
  EXPECT_EQ(run_bin(dir, {"frobnicate"}).code, 2);
  EXPECT_EQ(run_bin(dir, {"simulate"}).code, 2);                      // --out missing
  EXPECT_EQ(run_bin(dir, {"pathloss", "--freq", "28"}).code, 2);      // --dist missing
  EXPECT_EQ(run_bin(dir, {"pathloss", "--freq", "x", "--dist", "1"}).code, 2);
  const auto r = run_bin(dir, {"simulate", "--out", dir / "o", "--seasons", "Autumn"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Autumn"), std::string::npos);
}

// ----------------------------------------------------------- simulate ----

TEST(CliSimulate, MinimalGridGivesOneRow) {
  test::ScratchDir dir("cli-min");
  const auto r = run_bin(dir, minimal_sim(dir / "run"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = test::slurp(dir / "run/dataset.csv");
  EXPECT_EQ(line_count(csv), 2u);
  const auto t = read_csv(dir / "run/dataset.csv");
  EXPECT_EQ(t.row_count(), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / "run/manifest.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "run/scenario.conf"));
  EXPECT_NE(r.out.find("wrote 1 rows"), std::string::npos);
}

TEST(CliSimulate, DefaultFrequencies) {
  test::ScratchDir dir("cli-freq");
  const auto r = run_bin(dir, {"simulate", "--out", dir / "run", "--dist-steps", "2", "--drops", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = read_csv(dir / "run/dataset.csv");
  const auto c = *t.column_index(columns::kFrequency);
  std::set<double> freqs;
  for (const auto& row : t.rows()) freqs.insert(std::get<double>(row[c]));
  EXPECT_EQ(freqs, (std::set<double>{7.125, 24.25, 52.6, 71.0}));
}

TEST(CliSimulate, SameSeedSameBytesAndManifestReplay) {
  test::ScratchDir dir("cli-seed");
  const std::vector<std::string> base{"simulate", "--dist-steps", "3", "--drops", "2"};
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"--out", dir / "a", "--seed", "99"});
  b.insert(b.end(), {"--out", dir / "b", "--seed", "99", "--threads", "3"});
  c.insert(c.end(), {"--out", dir / "c", "--seed", "100"});
  ASSERT_EQ(run_bin(dir, a).code, 0);
  ASSERT_EQ(run_bin(dir, b).code, 0);
  ASSERT_EQ(run_bin(dir, c).code, 0);
  const auto first = test::slurp(dir / "a/dataset.csv");
  EXPECT_EQ(first, test::slurp(dir / "b/dataset.csv"));
  EXPECT_NE(first, test::slurp(dir / "c/dataset.csv"));

  const auto r = run_bin(dir, {"simulate", "--manifest", dir / "a/manifest.json", "--out", dir / "replay"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(test::slurp(dir / "replay/dataset.csv"), first);
  EXPECT_EQ(run_bin(dir, {"simulate", "--manifest", dir / "a/manifest.json", "--config", "x", "--out", dir / "r2"}).code,
            2);
}

TEST(CliSimulate, ConfigDirectoryOverridesDefaults) {
  test::ScratchDir dir("cli-env");
  auto conf = std::string(kDefaultConfig);
  conf = std::regex_replace(conf, std::regex(R"(frequencies = [^\n]*)"), "frequencies = 52.6");
  std::filesystem::create_directories(dir / "conf");
  test::spit(dir / "conf/scenario.conf", conf);
  const auto r = run_bin(dir, {"simulate", "--out", dir / "run", "--dist-steps", "1", "--drops", "1"},
                     "MMWPL_CONFIG_DIR=" + quote(dir / "conf"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto t = read_csv(dir / "run/dataset.csv");
  const auto c = *t.column_index(columns::kFrequency);
  for (const auto& row : t.rows()) EXPECT_EQ(std::get<double>(row[c]), 52.6);
}

TEST(CliSimulate, BadConfigIsRuntimeError) {
  test::ScratchDir dir("cli-badconf");
  const std::string conf = std::regex_replace(std::string(kDefaultConfig), std::regex(R"(drops = \d+)"), "drops = many");
  const auto line = 1 + std::count(conf.begin(), conf.begin() + static_cast<std::ptrdiff_t>(conf.find("drops = many")), '\n');
  test::spit(dir / "bad.conf", conf);
  const auto r = run_bin(dir, {"simulate", "--config", dir / "bad.conf", "--out", dir / "run"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line " + std::to_string(line)), std::string::npos) << r.err;
  EXPECT_EQ(run_bin(dir, {"simulate", "--config", dir / "missing.conf", "--out", dir / "run"}).code, 1);
}

// -------------------------------------------------------------- train ----

TEST(CliTrain, LinearRecoversSyntheticLine) {
  test::ScratchDir dir("cli-line");
  std::string csv = "T-R Separation Distance (m),Path Loss (dB)\n";
  for (int i = 0; i < 100; ++i) csv += std::to_string(i) + "," + std::to_string(60 + 0.5 * i) + "\n";
  test::spit(dir / "line.csv", csv);
  EXPECT_EQ(run_bin(dir, {"train", "--data", dir / "line.csv", "--out", dir / "strict", "--models", "linear"}).code, 1);
  const auto r =
      run_bin(dir, {"train", "--data", dir / "line.csv", "--out", dir / "run", "--models", "linear", "--no-strict"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_metrics_csv(dir / "run/metrics.csv");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_GE(*rows[0].metrics.r2, 0.999);
  EXPECT_TRUE(std::filesystem::exists(dir / "run/models/linear.json"));
  const auto model = load_model(dir / "run/models/linear.json");
  Matrix q(1, 1);
  q << 200;
  EXPECT_NEAR(model.predict(q)(0), 160.0, 1e-6);
}

TEST(CliTrain, AllModelsOnSimulatedData) {
  test::ScratchDir dir("cli-all");
  ASSERT_EQ(run_bin(dir, {"simulate", "--out", dir / "sim", "--dist-steps", "3", "--drops", "2"}).code, 0);
  const auto r = run_bin(dir, {"train", "--data", dir / "sim/dataset.csv", "--out", dir / "run", "--format", "csv",
                           "--set", "rf.trees=20"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_metrics_csv(dir / "run/metrics.csv");
  ASSERT_EQ(rows.size(), 9u);
  std::set<std::string> names;
  for (const auto& row : rows) {
    names.insert(row.model);
    EXPECT_NEAR(row.metrics.rmse * row.metrics.rmse, row.metrics.mse, 1e-9 * row.metrics.mse);
    EXPECT_LE(row.metrics.mae, row.metrics.rmse);
  }
  EXPECT_EQ(names.size(), 9u);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "Models,MAE,MSE,RMSE,R2");
  for (const char* f : {"metrics.txt", "published_comparison.txt", "manifest.json", "models/rf.json", "models/svm.json"})
    EXPECT_TRUE(std::filesystem::exists(dir / ("run/" + std::string(f)))) << f;
  const auto m = read_manifest(dir / "run/manifest.json");
  EXPECT_EQ(m["hyperparameters"]["rf"]["trees"], 20);

  // Replaying the train manifest reproduces the metrics file exactly.
  ASSERT_EQ(run_bin(dir, {"train", "--manifest", dir / "run/manifest.json", "--out", dir / "replay"}).code, 0);
  EXPECT_EQ(test::slurp(dir / "replay/metrics.csv"), test::slurp(dir / "run/metrics.csv"));
}

TEST(CliTrain, UnknownModelListsValidKinds) {
  test::ScratchDir dir("cli-unknown");
  const auto r = run_bin(dir, {"train", "--data", dir / "x.csv", "--out", dir / "run", "--models", "linear,xgboost"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("xgboost"), std::string::npos);
  for (const char* k : {"linear", "robust", "ridge", "lasso", "elasticnet", "polynomial", "sgd", "rf", "svm"})
    EXPECT_NE(r.err.find(k), std::string::npos) << k;
}

TEST(CliTrain, BadOverridesAreUsageErrors) {
  test::ScratchDir dir("cli-set");
  test::spit(dir / "d.csv", "a,Path Loss (dB)\n1,2\n");
  for (const char* s : {"ridge.lambda=-1", "ridge.nope=1", "ridge", "bogus.lambda=1", "ridge.lambda=abc"})
    EXPECT_EQ(run_bin(dir, {"train", "--data", dir / "d.csv", "--out", dir / "run", "--set", s}).code, 2) << s;
  EXPECT_EQ(run_bin(dir, {"train", "--data", dir / "d.csv", "--out", dir / "run", "--split", "1.5"}).code, 2);
}

TEST(CliTrain, MissingDataIsRuntimeError) {
  test::ScratchDir dir("cli-nodata");
  const auto r = run_bin(dir, {"train", "--data", dir / "absent.csv", "--out", dir / "run"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("absent.csv"), std::string::npos);
}

// ------------------------------------------------------------- report ----

TEST(CliReport, MissingInputNamed) {
  test::ScratchDir dir("cli-rep-missing");
  const auto r = run_bin(dir, {"report", "--data", dir / "nope.csv", "--out", dir / "rep"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nope.csv"), std::string::npos);
}

TEST(CliReport, WinterOnlyDatasetGivesOneChart) {
  test::ScratchDir dir("cli-rep");
  ASSERT_EQ(run_bin(dir, {"simulate", "--out", dir / "sim", "--seasons", "Winter", "--dist-steps", "3", "--drops", "1"})
                .code,
            0);
  const auto r = run_bin(dir, {"report", "--data", dir / "sim/dataset.csv", "--out", dir / "rep"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::size_t charts = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path() / "rep"))
    charts += e.path().filename().string().rfind("pathloss_", 0) == 0 && e.path().extension() == ".svg";
  EXPECT_EQ(charts, 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / "rep/pathloss_winter.svg"));
  EXPECT_TRUE(std::filesystem::exists(dir / "rep/pathloss_winter.csv"));
}

// ----------------------------------------------------------- pathloss ----

TEST(CliPathLoss, ReferenceValues) {
  test::ScratchDir dir("cli-pl");
  auto r = run_bin(dir, {"pathloss", "--freq", "1", "--dist", "1", "--alpha", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::regex_search(r.out, std::regex(R"(path loss \(dB\) +32\.4\n)"))) << r.out;
  r = run_bin(dir, {"pathloss", "--freq", "7.125", "--dist", "100", "--alpha", "0", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto t = read_csv(in);
  ASSERT_EQ(t.row_count(), 1u);
  const auto& row = t.rows()[0];
  const double total = std::get<double>(row[4]);
  EXPECT_NEAR(total, 113.456, 1e-3);
  EXPECT_NEAR(std::get<double>(row[0]) + std::get<double>(row[1]) + std::get<double>(row[2]) +
                  std::get<double>(row[3]),
              total, 1e-9);
}

TEST(CliPathLoss, WeatherDerivesAlpha) {
  test::ScratchDir dir("cli-pl-weather");
  const auto r = run_bin(dir, {"pathloss", "--freq", "71", "--dist", "200", "--rain-rate", "10", "--format", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const auto t = read_csv(in);
  EXPECT_GT(std::get<double>(t.rows()[0][5]), 0.0);
  EXPECT_EQ(run_bin(dir, {"pathloss", "--freq", "71", "--dist", "200", "--rain-rate", "10", "--alpha", "0.1"}).code, 2);
  EXPECT_EQ(run_bin(dir, {"pathloss", "--freq", "71", "--dist", "0"}).code, 1);
}
