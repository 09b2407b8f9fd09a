// Copyright 2026 The ppbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "ppbench/experiment.hpp"

namespace pp = ppbench;
namespace ex = ppbench::experiment;
namespace fs = std::filesystem;

namespace {

const std::string kDataDir = PPBENCH_DATA_DIR;
const std::string kCli = PPBENCH_CLI_PATH;

struct CommandResult {
  int status = -1;
  std::string out;
};

// Runs `args` through the shell; stdout is captured, stderr is folded in.
CommandResult run_cli(const std::string& args) {
  CommandResult r;
  const std::string cmd = kCli + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() /
                     ("ppbench_experiment_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  return p;
}

// Small, fast settings; the fake clock makes runs reproducible.
ex::ExperimentConfig quick(ex::Kind kind) {
  ex::ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.key_bits = 256;
  cfg.clock = ex::ClockKind::kFake;
  cfg.datasets = {{"Dow Jones Index", kDataDir + "/dow_jones_index.csv", "volume"},
                  {"Bank Marketing", kDataDir + "/bank.csv", "balance"}};
  return cfg;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    files[fs::relative(entry.path(), dir).string()] = os.str();
  }
  return files;
}

}  // namespace

TEST(Parse, DistributionSpecs) {
  const pp::data::DistSpec g = ex::parse_dist("gamma:2:2:120");
  EXPECT_EQ(g.family, pp::data::Family::kGamma);
  EXPECT_DOUBLE_EQ(g.p1, 2.0);
  EXPECT_DOUBLE_EQ(g.scale_factor, 120.0);
  EXPECT_DOUBLE_EQ(ex::parse_dist("uniform:80:160").scale_factor, 1.0);
  EXPECT_THROW(ex::parse_dist("uniform:80"), pp::ParameterError);
  EXPECT_THROW(ex::parse_dist("zipf:1:2"), pp::ParameterError);
  EXPECT_THROW(ex::parse_dist("normal:a:2"), pp::ParameterError);
}

TEST(Parse, DatasetRefs) {
  const ex::DatasetRef named = ex::parse_dataset("Bank=data/bank.csv:balance");
  EXPECT_EQ(named.name, "Bank");
  EXPECT_EQ(named.path, "data/bank.csv");
  EXPECT_EQ(named.column, "balance");
  EXPECT_EQ(ex::parse_dataset("data/bank.csv:age").name, "bank");
  EXPECT_THROW(ex::parse_dataset("data/bank.csv"), pp::ParameterError);
}

TEST(Config, DefaultsMirrorTheBenchmark) {
  const ex::ExperimentConfig cfg;
  EXPECT_EQ(cfg.parties, 3u);
  EXPECT_EQ(cfg.m_list, (std::vector<std::size_t>{1000, 5000}));
  EXPECT_EQ(cfg.sizes, (std::vector<std::size_t>{50, 500, 1000}));
  EXPECT_EQ(cfg.distributions.size(), 4u);
  EXPECT_EQ(cfg.key_bits, 2048u);
}

TEST(Config, JsonKeys) {
  ex::ExperimentConfig cfg;
  ex::apply_json(cfg, nlohmann::json::parse(R"({
    "experiment": "type2", "protocols": ["MPC"], "m": [10, 20], "sizes": [7],
    "distributions": ["normal:100:10", {"family": "beta", "p1": 2, "p2": 3, "scale": 50}],
    "parties": 4, "key_bits": 512, "modulus": "101", "mode": "exact", "seed": 9,
    "format": "json", "fit_on": "means", "scheduling": "sequential", "clock": "fake"
  })"));
  EXPECT_EQ(cfg.experiment, ex::Kind::kType2);
  EXPECT_EQ(cfg.protocols, std::vector<pp::mean::Protocol>{pp::mean::Protocol::kMpc});
  EXPECT_EQ(cfg.distributions.size(), 2u);
  EXPECT_DOUBLE_EQ(cfg.distributions[1].scale_factor, 50.0);
  EXPECT_EQ(cfg.q, 101u);
  EXPECT_EQ(cfg.mode, pp::mean::Mode::kExact);
  EXPECT_FALSE(cfg.pooled_regression);
  EXPECT_EQ(cfg.scheduling, pp::sim::Scheduling::kSequential);
  EXPECT_EQ(cfg.clock, ex::ClockKind::kFake);
  EXPECT_THROW(ex::apply_json(cfg, nlohmann::json::parse(R"({"mode": "fast"})")),
               pp::ParameterError);
}

TEST(Config, SmokeScaling) {
  ex::ExperimentConfig cfg;
  ex::apply_smoke(cfg);
  EXPECT_EQ(cfg.m_list, (std::vector<std::size_t>{10, 50}));
  EXPECT_EQ(cfg.sizes, (std::vector<std::size_t>{1, 5, 10}));
}

TEST(Config, ValidationListsEveryProblem) {
  ex::ExperimentConfig cfg = quick(ex::Kind::kType1);
  cfg.m_list = {50, 10};
  cfg.parties = 1;
  cfg.key_bits = 15;
  cfg.datasets.push_back({"missing", "/nonexistent.csv", "v"});
  EXPECT_EQ(ex::validate(cfg).size(), 4u);

  ex::ExperimentConfig sweep = quick(ex::Kind::kType2);
  sweep.q = 10;
  sweep.sizes = {5, 7};
  const auto errors = ex::validate(sweep);
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_NE(errors[0].find("not invertible"), std::string::npos);
  sweep.mode = pp::mean::Mode::kExact;
  EXPECT_TRUE(ex::validate(sweep).empty());
}

TEST(Cells, SameDataForBothProtocols) {
  EXPECT_EQ(ex::cell_seed(1, "uniform", 50), ex::cell_seed(1, "uniform", 50));
  EXPECT_NE(ex::cell_seed(1, "uniform", 50), ex::cell_seed(1, "uniform", 500));
  EXPECT_NE(ex::cell_seed(1, "uniform", 50), ex::cell_seed(2, "uniform", 50));
}

TEST(Type1, SmokeTableHasEightRows) {
  ex::ExperimentConfig cfg = quick(ex::Kind::kType1);
  cfg.smoke = true;
  ex::apply_smoke(cfg);
  ASSERT_TRUE(ex::validate(cfg).empty());
  const ex::ExperimentResult r = ex::cmd_type1(cfg);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.table.title, "Experiment Type I - Runtimes in Milliseconds");
  ASSERT_EQ(r.table.rows.size(), 8u);
  const std::vector<std::string> layout{
      "Dow Jones Index (8 instances) HE 10",      "Dow Jones Index (8 instances) HE 50",
      "Dow Jones Index (8 instances) MPC 10",     "Dow Jones Index (8 instances) MPC 50",
      "Bank Marketing (46 instances) HE 10",      "Bank Marketing (46 instances) HE 50",
      "Bank Marketing (46 instances) MPC 10",     "Bank Marketing (46 instances) MPC 50"};
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& row = r.table.rows[i];
    EXPECT_EQ(row.dataset + " " + row.protocol + " " + std::to_string(row.m), layout[i]);
    EXPECT_TRUE(std::isfinite(row.theta_cli) && row.theta_cli > 0.0);
    EXPECT_TRUE(std::isfinite(row.theta_srv) && row.theta_srv > 0.0);
  }
}

TEST(Type1, RealClockGivesPositiveTimes) {
  ex::ExperimentConfig cfg = quick(ex::Kind::kType1);
  cfg.clock = ex::ClockKind::kSteady;
  cfg.m_list = {3};
  cfg.smoke = true;
  const ex::ExperimentResult r = ex::cmd_type1(cfg);
  ASSERT_EQ(r.table.rows.size(), 4u);
  for (const auto& row : r.table.rows) {
    EXPECT_GT(row.theta_cli, 0.0);
    EXPECT_GT(row.theta_srv, 0.0);
  }
}

TEST(Type2, SmallGrid) {
  ex::ExperimentConfig cfg = quick(ex::Kind::kType2);
  cfg.distributions = {ex::parse_dist("uniform:80:160")};
  cfg.sizes = {50, 500};
  cfg.protocols = {pp::mean::Protocol::kMpc};
  cfg.m_list = {10};
  const ex::ExperimentResult r = ex::cmd_type2(cfg);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.table.rows.size(), 2u);
}

TEST(Type2, SmokeGridHas48Cells) {
  ex::ExperimentConfig cfg = quick(ex::Kind::kType2);
  ex::apply_smoke(cfg);
  const ex::ExperimentResult r = ex::cmd_type2(cfg);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.table.rows.size(), 48u);
  EXPECT_EQ(r.cells.size(), 24u);
  ASSERT_EQ(r.table.regressions.size(), 2u);
  EXPECT_EQ(r.table.regressions[0].protocol, "HE");
  EXPECT_EQ(r.table.regressions[1].protocol, "MPC");
}

TEST(Type2, ParallelCellsMatchSerialUnderFakeClock) {
  ex::ExperimentConfig cfg = quick(ex::Kind::kType2);
  cfg.distributions = {ex::parse_dist("normal:120:30")};
  cfg.sizes = {5, 10};
  cfg.m_list = {4};
  const std::string serial = pp::stats::render(ex::cmd_type2(cfg).table, pp::stats::Format::kCsv);
  cfg.parallel_cells = true;
  EXPECT_EQ(pp::stats::render(ex::cmd_type2(cfg).table, pp::stats::Format::kCsv), serial);
}

TEST(Type2, FailedCellsAreReported) {
  ex::ExperimentConfig cfg = quick(ex::Kind::kType2);
  cfg.distributions = {ex::parse_dist("uniform:80:160")};
  cfg.sizes = {5, 10};
  cfg.protocols = {pp::mean::Protocol::kMpc};
  cfg.mode = pp::mean::Mode::kExact;
  cfg.q = 101;  // a sum of ten values near 120 overflows Z_101
  cfg.m_list = {2};
  const ex::ExperimentResult r = ex::cmd_type2(cfg);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.failed_cells.size(), 2u);
}

TEST(Adhoc, ValuesAndProtocols) {
  ex::ExperimentConfig cfg = quick(ex::Kind::kAdhoc);
  cfg.values = {1, 2, 3, 4};
  cfg.mode = pp::mean::Mode::kExact;
  cfg.m_list = {1};
  cfg.protocols = {pp::mean::Protocol::kMpc};
  const ex::AdhocResult mpc = ex::cmd_adhoc(cfg);
  EXPECT_EQ(mpc.value, 2);
  EXPECT_EQ(mpc.run.samples.size(), 1u);
  cfg.protocols = {pp::mean::Protocol::kHe};
  EXPECT_EQ(ex::cmd_adhoc(cfg).value, 2);
}

TEST(Adhoc, HeAndMpcAgreeOnTheSameDraw) {
  ex::ExperimentConfig cfg = quick(ex::Kind::kAdhoc);
  cfg.distributions = {ex::parse_dist("gamma:2:2:120")};
  cfg.sizes = {37};
  cfg.mode = pp::mean::Mode::kExact;
  cfg.m_list = {3};
  cfg.protocols = {pp::mean::Protocol::kMpc};
  const mpz_class mpc = ex::cmd_adhoc(cfg).value;
  cfg.protocols = {pp::mean::Protocol::kHe};
  EXPECT_EQ(ex::cmd_adhoc(cfg).value, mpc);
}

TEST(Outputs, FilesAndNames) {
  ex::ExperimentConfig cfg = quick(ex::Kind::kType2);
  cfg.distributions = {ex::parse_dist("uniform:80:160")};
  cfg.sizes = {5, 10};
  cfg.protocols = {pp::mean::Protocol::kMpc};
  cfg.m_list = {3};
  cfg.verbose = true;
  cfg.out_dir = scratch_dir("outputs").string();
  cfg.timestamp = "T0";
  cfg.format = pp::stats::Format::kJson;
  ex::ExperimentResult r = ex::cmd_type2(cfg);
  ex::write_outputs(r, cfg);
  const fs::path out(cfg.out_dir);
  EXPECT_TRUE(fs::exists(out / "type2-T0.json"));
  EXPECT_TRUE(fs::exists(out / "type2-T0-samples" / "uniform_80__160__n5_MPC_M3.csv"));
  EXPECT_TRUE(fs::exists(out / "type2-T0-samples" / "uniform_80__160__n5_MPC_transcript.jsonl"));
  std::ifstream report(out / "type2-T0.json");
  std::stringstream text;
  text << report.rdbuf();
  EXPECT_EQ(pp::stats::parse_json_report(text.str()).rows.size(), 2u);
  fs::remove_all(out);
}

TEST(Cli, AdhocPrintsTheMean) {
  const CommandResult r = run_cli("--experiment adhoc --values 1,2,3,4 --m 1");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("mean: 2"), std::string::npos) << r.out;
  const CommandResult he =
      run_cli("--experiment adhoc --protocol HE --key-bits 256 --values 1,2,3,4 --m 2");
  EXPECT_EQ(he.status, 0) << he.out;
  EXPECT_NE(he.out.find("mean: 2"), std::string::npos) << he.out;
}

TEST(Cli, InvalidCombinationsExitWithUsage) {
  for (const std::string args :
       {"--experiment adhoc --values 1,2 --dist uniform:1:5", "--experiment bogus",
        "--experiment adhoc --values 1,2 --parties 1", "--experiment adhoc --values 1,2 --m 0",
        "--experiment type1 --dataset /nonexistent.csv:v", "--no-such-flag",
        "--experiment adhoc --protocol HE,MPC --values 1,2"}) {
    const CommandResult r = run_cli(args);
    EXPECT_EQ(r.status, 1) << args << "\n" << r.out;
    EXPECT_NE(r.out.find("--experiment"), std::string::npos) << args;
  }
}

TEST(Cli, RuntimeFailureExitsTwo) {
  const fs::path out = scratch_dir("runtime");
  const CommandResult r = run_cli(
      "--experiment type2 --protocol MPC --mode exact --modulus 101 --dist uniform:80:160 "
      "--sizes 10 --m 2 --clock fake --out " + out.string());
  EXPECT_EQ(r.status, 2) << r.out;
  EXPECT_NE(r.out.find("failed:"), std::string::npos) << r.out;
  fs::remove_all(out);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const fs::path dir = scratch_dir("config");
  fs::create_directories(dir);
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"experiment": "type2", "protocols": ["MPC"], "m": [2],
                            "sizes": [5, 10], "distributions": ["uniform:80:160"],
                            "clock": "fake", "format": "csv"})";
  const CommandResult r = run_cli("--config " + cfg.string() + " --sizes 3,4,5");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("\"uniform(80, 160)\",3,MPC,2,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"uniform(80, 160)\",5,MPC,2,"), std::string::npos) << r.out;
  fs::remove_all(dir);
}

TEST(Cli, SampleFilesAreReproducible) {
  const fs::path a = scratch_dir("repro_a");
  const fs::path b = scratch_dir("repro_b");
  const std::string args =
      "--experiment type2 --smoke --clock fake --key-bits 256 --seed 5 --timestamp T "
      "--dist uniform:80:160 --dist beta:30:2:120 --out ";
  ASSERT_EQ(run_cli(args + a.string()).status, 0);
  ASSERT_EQ(run_cli(args + b.string()).status, 0);
  const auto tree_a = read_tree(a);
  EXPECT_EQ(tree_a.size(), 1u + 2 * 3 * 2 * 2);
  EXPECT_EQ(tree_a, read_tree(b));
  fs::remove_all(a);
  fs::remove_all(b);
}
