// Copyright 2026 The gxe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gxe/csv.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  // Runs the CLI with stdout and stderr captured to files; returns the exit code.
  int run(const std::string& args) {
    const std::string cmd = "cd '" + dir_.path().string() + "' && '" GXE_CLI_PATH "' " + args + " > out.txt 2> err.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() const { return slurp(dir_.path() / "out.txt"); }
  std::string err() const { return slurp(dir_.path() / "err.txt"); }
  fs::path at(const std::string& name) const { return dir_.path() / name; }
  void write(const std::string& name, const std::string& text) { std::ofstream(at(name)) << text; }

  void simulate(const std::string& dir, const std::string& extra = "") {
    ASSERT_EQ(run("simulate --varieties 6 --environments 8 --length 60 --seed 3 --out " + dir + " " + extra), 0) << err();
  }
  static std::string data_flags(const std::string& dir) {
    return "--trials " + dir + "/trials.csv --genotypes " + dir + "/genotypes.csv --env " + dir + "/env.csv";
  }

  gxe::fixtures::TempDir dir_{"cli"};
};

}  // namespace

TEST_F(CliTest, UnknownPresetIsUsageError) {
  simulate("d");
  EXPECT_EQ(run("fit --method GP99 " + data_flags("d")), 2);
  EXPECT_NE(err().find("GP5~"), std::string::npos);
  EXPECT_NE(err().find("GLO_A"), std::string::npos);
  EXPECT_EQ(run("cv --scenario sideways " + data_flags("d")), 2);
  EXPECT_EQ(run("frobnicate"), 2);
}

TEST_F(CliTest, SimulateWritesBoundedDeterministicFiles) {
  ASSERT_EQ(run("simulate --varieties 20 --environments 15 --seed 1 --out a"), 0) << err();
  ASSERT_EQ(run("simulate --varieties 20 --environments 15 --seed 1 --out b"), 0) << err();
  for (const char* f : {"trials.csv", "genotypes.csv", "env.csv"}) {
    ASSERT_TRUE(fs::exists(at("a") / f)) << f;
    EXPECT_EQ(slurp(at("a") / f), slurp(at("b") / f)) << f;
  }
  const auto rows = lines(slurp(at("a") / "trials.csv"));
  EXPECT_LE(rows.size() - 1, 300u);
  EXPECT_GE(rows.size() - 1, 1u);
  EXPECT_EQ(run("simulate --varsigma 1.5 --out c"), 2);
  EXPECT_EQ(run("simulate --varieties 1 --out c"), 2);
}

TEST_F(CliTest, FitWritesModelAndTrace) {
  simulate("d");
  ASSERT_EQ(run("fit --method GP5~ --trait yield " + data_flags("d") + " --out model.json"), 0) << err();
  EXPECT_TRUE(fs::exists(at("model.json")));
  const auto trace = lines(slurp(at("model.trace.csv")));
  ASSERT_GE(trace.size(), 2u);
  EXPECT_EQ(trace[0], "iter,theta_g,theta_e,alpha,beta,gamma,varsigma,nll,grad_norm");
  for (const char* key : {"theta_G", "theta_E", "alpha", "beta", "gamma", "varsigma", "nu", "m_hat"}) {
    EXPECT_NE(out().find(key), std::string::npos) << key;
  }
}

TEST_F(CliTest, GenotypeOnlyModeFixesWeights) {
  simulate("d");
  ASSERT_EQ(run("fit --method GP5 --mode G " + data_flags("d") + " --out g.json"), 0) << err();
  const auto model = nlohmann::json::parse(slurp(at("g.json")));
  EXPECT_EQ(model["hyperparameters"]["alpha"].get<double>(), 1.0);
  EXPECT_EQ(model["hyperparameters"]["beta"].get<double>(), 0.0);
  EXPECT_EQ(model["hyperparameters"]["gamma"].get<double>(), 0.0);
  EXPECT_EQ(lines(slurp(at("g.trace.csv"))).size() > 1, true);
}

TEST_F(CliTest, PredictInterpolatesNoiseFreeModel) {
  simulate("d");
  ASSERT_EQ(run("fit " + data_flags("d") + " --out m.json"), 0) << err();
  auto model = nlohmann::json::parse(slurp(at("m.json")));
  model["hyperparameters"]["varsigma"] = 1.0;
  std::ofstream(at("m1.json")) << model.dump(1);
  const auto trials = lines(slurp(at("d") / "trials.csv"));
  const auto first = gxe::csv::split_line(trials[1]);
  const auto header = gxe::csv::split_line(trials[0]);
  std::size_t v = 0, e = 0, value = 0;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "variety_id") v = i;
    if (header[i] == "environment_id") e = i;
    if (header[i] == "value") value = i;
  }
  write("t.csv", "variety_id,environment_id\n" + first[v] + "," + first[e] + "\n");
  ASSERT_EQ(run("predict --model m1.json --targets t.csv"), 0) << err();
  const auto rows = lines(out());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "variety_id,environment_id,mean,sd_latent,sd_observation,error");
  const auto cells = gxe::csv::split_line(rows[1]);
  EXPECT_NEAR(std::stod(cells[2]), std::stod(first[value]), 1e-6);
  EXPECT_NEAR(std::stod(cells[3]), 0.0, 1e-3);
}

TEST_F(CliTest, PredictErrorRowsAndEmptyTargets) {
  simulate("d");
  ASSERT_EQ(run("fit " + data_flags("d") + " --out m.json --max-iters 20"), 0) << err();
  write("empty.csv", "variety_id,environment_id\n");
  ASSERT_EQ(run("predict --model m.json --targets empty.csv --out p.csv"), 0) << err();
  EXPECT_EQ(slurp(at("p.csv")), "variety_id,environment_id,mean,sd_latent,sd_observation,error\n");
  write("mixed.csv", "variety_id,environment_id\nV1,E1\nV99,E1\n");
  ASSERT_EQ(run("predict --model m.json --targets mixed.csv"), 0) << err();
  const auto rows = lines(out());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NE(rows[2].find("unknown variety V99"), std::string::npos);
  write("bad.csv", "variety_id,environment_id\nV99,E1\nV1,E99\n");
  EXPECT_EQ(run("predict --model m.json --targets bad.csv"), 1);
  EXPECT_NE(out().find("unknown environment E99"), std::string::npos);
}

TEST_F(CliTest, CrossValidationRowsAndDeterminism) {
  simulate("d");
  ASSERT_EQ(run("cv --method GLO_A " + data_flags("d") + " --scenario new-environment --leakage 1 --splits 30 --seed 7 --out cv1"),
            0)
      << err();
  const auto rows = lines(slurp(at("cv1") / "splits.csv"));
  ASSERT_EQ(rows.size(), 31u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = gxe::csv::split_line(rows[i]);
    EXPECT_EQ(cells[0], "GLO_A");
    EXPECT_EQ(cells[7], "");  // logs
  }
  ASSERT_EQ(run("cv --method GLO_A " + data_flags("d") + " --scenario new-environment --leakage 1 --splits 30 --seed 7 --out cv2"),
            0);
  for (const char* f : {"splits.csv", "summary.csv", "long.csv"}) EXPECT_EQ(slurp(at("cv1") / f), slurp(at("cv2") / f)) << f;
}

TEST_F(CliTest, SimulatedDataCrossValidatesCleanly) {
  simulate("d");
  ASSERT_EQ(run("cv --method GP5~,VAR_A " + data_flags("d") + " --splits 3 --jobs 2 --out cv"), 0) << err();
  const auto rows = lines(slurp(at("cv") / "splits.csv"));
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[1].substr(rows[1].size() - 3), ",ok");
  EXPECT_TRUE(fs::exists(at("cv") / "hyperparameters.csv"));
  EXPECT_NE(out().find("GP5~"), std::string::npos);
}

TEST_F(CliTest, ConfigFileDefaultsYieldToFlags) {
  simulate("d");
  write("cfg.json", R"({"method": "GLO_A", "splits": 4, "seed": 2, "out": "from_config"})");
  ASSERT_EQ(run("cv --config cfg.json " + data_flags("d") + " --splits 2"), 0) << err();
  EXPECT_EQ(lines(slurp(at("from_config") / "splits.csv")).size(), 3u);
  write("broken.json", "{");
  EXPECT_NE(run("cv --config broken.json " + data_flags("d")), 0);
}

TEST_F(CliTest, NoiseFreeSimulationRefitsHighVarsigma) {
  ASSERT_EQ(run("simulate --varsigma 1.0 --seed 5 --out s"), 0) << err();
  ASSERT_EQ(run("fit " + data_flags("s") + " --out s.json"), 0) << err();
  const auto model = nlohmann::json::parse(slurp(at("s.json")));
  EXPECT_GT(model["hyperparameters"]["varsigma"].get<double>(), 0.9);
}
