// Copyright 2026 The ecoplan Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     https://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the built command line tool as a subprocess.

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "support.h"

namespace ecoplan {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int LineCount(const fs::path& path) {
  const std::string text = Slurp(path);
  return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() /
            (std::string("ecoplan_cli_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  // Runs the tool with `arguments`; stdout and stderr land in files.
  int Run(const std::string& arguments, const std::string& env = "") {
    const std::string command =
        env + (env.empty() ? "" : " ") + "'" + ECOPLAN_CLI_PATH + "' " +
        arguments + " >'" + (root_ / "stdout").string() + "' 2>'" +
        (root_ / "stderr").string() + "'";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Err() const { return Slurp(root_ / "stderr"); }
  fs::path Dir(const std::string& name) const { return root_ / name; }

  static std::string Scenario(const std::string& name) {
    return "--scenario '" + testing::ScenarioPath(name) + "'";
  }

  nlohmann::json ReadJson(const fs::path& path) const {
    return nlohmann::json::parse(Slurp(path));
  }

  fs::path root_;
};

TEST_F(CliTest, PlanWritesOneRowPerNode) {
  ASSERT_EQ(Run("plan " + Scenario("pinned") + " --out " + Dir("a").string()),
            0)
      << Err();
  EXPECT_EQ(LineCount(Dir("a") / "trajectory.csv"), 1002);
  EXPECT_EQ(LineCount(Dir("a") / "controls.csv"), 1001);
  const auto solve = ReadJson(Dir("a") / "solve.json");
  EXPECT_EQ(solve["status"], "optimal");
  EXPECT_NEAR(solve["objective_J"].get<double>(), 4.0e6 - 111040.0, 20.0);
  EXPECT_TRUE(ReadJson(Dir("a") / "feasibility.json")["feasible"]);
}

TEST_F(CliTest, InfeasibleHorizonExitsWithTwo) {
  EXPECT_EQ(Run("plan " + Scenario("paperlike") +
                " --horizon 60 --grid 100 --out " + Dir("b").string()),
            2);
  EXPECT_EQ(ReadJson(Dir("b") / "solve.json")["status"], "infeasible");
  EXPECT_FALSE(fs::exists(Dir("b") / "trajectory.csv"));
}

TEST_F(CliTest, HorizonOptionOverridesTheFile) {
  ASSERT_EQ(Run("plan " + Scenario("paperlike") + " --grid 100 --out " +
                Dir("file").string()),
            0);
  ASSERT_EQ(Run("plan " + Scenario("paperlike") +
                " --grid 100 --horizon 320 --out " + Dir("flag").string()),
            0);
  const double at_file =
      ReadJson(Dir("file") / "solve.json")["objective_J"].get<double>();
  const double at_flag =
      ReadJson(Dir("flag") / "solve.json")["objective_J"].get<double>();
  EXPECT_GT(at_flag, at_file);
  const std::string csv = Slurp(Dir("flag") / "trajectory.csv");
  const auto last = csv.rfind('\n', csv.size() - 2);
  EXPECT_EQ(csv.substr(last + 1, 4), "320,");
}

TEST_F(CliTest, ErrorsExitWithOne) {
  EXPECT_EQ(Run("plan --scenario /no/such/file.json --out " +
                Dir("c").string()),
            1);
  EXPECT_NE(Err().find("/no/such/file.json"), std::string::npos);

  std::ofstream(Dir("bad.json")) << "{\n  \"vehicle\": [1,\n";
  EXPECT_EQ(Run("plan --scenario '" + Dir("bad.json").string() +
                "' --out " + Dir("c").string()),
            1);
  EXPECT_NE(Err().find("ecoplan: "), std::string::npos);
  EXPECT_NE(Err().find("line "), std::string::npos);

  EXPECT_EQ(Run("min-time " + Scenario("energy_bound") + " --t-tol 0 --out " +
                Dir("c").string()),
            1);
  EXPECT_NE(Err().find("must be positive"), std::string::npos);

  EXPECT_EQ(Run("plan " + Scenario("paperlike")), 1);  // no --out
  EXPECT_EQ(Run("frobnicate"), 1);
  EXPECT_EQ(Run("--help"), 0);
}

TEST_F(CliTest, ParetoIsDeterministicAndMatchesPlan) {
  const std::string sweep = "pareto " + Scenario("paperlike") +
                            " --grid 100 --t-min 200 --t-max 400 --points 5";
  ASSERT_EQ(Run(sweep + " --out " + Dir("p1").string()), 0) << Err();
  ASSERT_EQ(Run(sweep + " --out " + Dir("p2").string()), 0);
  const std::string csv = Slurp(Dir("p1") / "pareto.csv");
  EXPECT_EQ(csv, Slurp(Dir("p2") / "pareto.csv"));
  EXPECT_EQ(LineCount(Dir("p1") / "pareto.csv"), 6);
  EXPECT_NE(csv.find("\n200,,infeasible\n"), std::string::npos);

  ASSERT_EQ(Run("plan " + Scenario("paperlike") +
                " --grid 100 --horizon 300 --out " + Dir("plan").string()),
            0);
  const double planned =
      4.0e3 -
      ReadJson(Dir("plan") / "solve.json")["objective_J"].get<double>() / 1e3;
  const auto row = csv.find("\n300,");
  ASSERT_NE(row, std::string::npos);
  const double swept = std::stod(csv.substr(row + 5));
  EXPECT_NEAR(swept, planned, 1e-5 * 4.0e3);
}

TEST_F(CliTest, ParetoWithNoFeasibleHorizonExitsWithTwo) {
  EXPECT_EQ(Run("pareto " + Scenario("paperlike") +
                " --grid 100 --t-min 50 --t-max 100 --points 3 --out " +
                Dir("q").string()),
            2);
  EXPECT_EQ(LineCount(Dir("q") / "pareto.csv"), 4);
}

TEST_F(CliTest, PlotsDoNotChangeTheData) {
  const std::string plan = "plan " + Scenario("paperlike") + " --grid 200";
  ASSERT_EQ(Run(plan + " --out " + Dir("plain").string()), 0);
  ASSERT_EQ(Run(plan + " --svg --out " + Dir("svg").string()), 0);
  for (const char* name :
       {"trajectory.csv", "controls.csv", "solve.json", "feasibility.json"}) {
    EXPECT_EQ(Slurp(Dir("plain") / name), Slurp(Dir("svg") / name)) << name;
  }
  EXPECT_TRUE(fs::exists(Dir("svg") / "speed.svg"));
  EXPECT_FALSE(fs::exists(Dir("plain") / "speed.svg"));
}

TEST_F(CliTest, SimulatingPlannedControlsIsFeasible) {
  ASSERT_EQ(Run("plan " + Scenario("paperlike") + " --out " +
                Dir("plan").string()),
            0);
  ASSERT_EQ(Run("simulate " + Scenario("paperlike") + " --controls '" +
                (Dir("plan") / "controls.csv").string() + "' --out " +
                Dir("sim").string()),
            0)
      << Err();
  EXPECT_TRUE(ReadJson(Dir("sim") / "feasibility.json")["feasible"]);
  EXPECT_EQ(LineCount(Dir("sim") / "trajectory.csv"), 1002);
}

TEST_F(CliTest, NegativeBrakeInControlsIsAnError) {
  std::ofstream(Dir("neg.csv"))
      << "t_s,Pdrv_kW,Pbrk_kW\n0,10,0\n140,10,-2\n";
  EXPECT_EQ(Run("simulate " + Scenario("paperlike") + " --controls '" +
                Dir("neg.csv").string() + "' --out " + Dir("s").string()),
            1);
  EXPECT_NE(Err().find("nonnegative"), std::string::npos);
}

TEST_F(CliTest, DominanceHonoursTheSeed) {
  const std::string cmd =
      "dominance " + Scenario("pinned") + " --grid 100 --count 5 --out ";
  ASSERT_EQ(Run(cmd + Dir("d1").string(), "ECOPLAN_SEED=7"), 0) << Err();
  ASSERT_EQ(Run(cmd + Dir("d2").string(), "ECOPLAN_SEED=7"), 0);
  ASSERT_EQ(Run(cmd + Dir("d3").string(), "ECOPLAN_SEED=8"), 0);
  const auto d1 = ReadJson(Dir("d1") / "dominance.json");
  EXPECT_EQ(d1["seed"], 7);
  EXPECT_EQ(d1["accepted"], 5);
  EXPECT_TRUE(d1["dominated"]);
  EXPECT_EQ(Slurp(Dir("d1") / "dominance.json"),
            Slurp(Dir("d2") / "dominance.json"));
  EXPECT_NE(Slurp(Dir("d1") / "dominance.json"),
            Slurp(Dir("d3") / "dominance.json"));
  EXPECT_EQ(Run(cmd + Dir("d4").string(), "ECOPLAN_SEED=seven"), 1);
}

TEST_F(CliTest, MinTimeWritesItsSearch) {
  ASSERT_EQ(Run("min-time " + Scenario("energy_bound") +
                " --grid 100 --out " + Dir("m").string()),
            0)
      << Err();
  const auto search = ReadJson(Dir("m") / "search.json");
  EXPECT_GT(search["T_star_s"].get<double>(),
            search["T_lower_s"].get<double>());
  EXPECT_FALSE(search["history"].empty());
  EXPECT_TRUE(fs::exists(Dir("m") / "trajectory.csv"));
}

}  // namespace
}  // namespace ecoplan
