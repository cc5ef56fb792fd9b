// Copyright 2026 The Ellipsoid Shield Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Runs the command-line driver as a subprocess.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int status = -1;
  std::string output;  // stdout and stderr
  double seconds = 0.0;
};

Result Exec(const std::string& binary, const std::string& args) {
  const std::string cmd = "'" + binary + "' " + args + " 2>&1";
  const auto start = std::chrono::steady_clock::now();
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.output.append(buf, n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
  return r;
}

Result Cli(const std::string& args) { return Exec(ESHIELD_CLI, args); }

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("eshield_cli_" +
            std::string(::testing::UnitTest::GetInstance()
                            ->current_test_info()
                            ->name()) +
            "_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path Write(const std::string& name, const std::string& text) {
    const fs::path path = dir_ / name;
    std::ofstream(path) << text;
    return path;
  }

  std::string Out(const std::string& sub = "out") const {
    return "'" + (dir_ / sub).string() + "'";
  }

  fs::path dir_;
};

std::string Bundled(const std::string& name) {
  return "'" + std::string(ESHIELD_SOURCE_DIR) + "/scenarios/" + name + "'";
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Cli("").status, 2);
  EXPECT_EQ(Cli("fly").status, 2);
  EXPECT_EQ(Cli("run").status, 2);  // --scenario is required
  EXPECT_EQ(Cli("run --scenario x.json --dt -1").status, 2);
  EXPECT_EQ(Cli("--help").status, 0);
}

TEST_F(CliTest, MalformedScenarioExitsTwoWithLocation) {
  const fs::path bad = Write("bad.json", R"({"mode": "rbm2d", "t_end": 1,
      "bodies": [{"id": 1, "p": [0], "yaw": 0, "axes": [1, 1]}]})");
  const Result r = Cli("run --scenario '" + bad.string() + "' --out " + Out());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.output.find("/bodies/0/p"), std::string::npos) << r.output;

  const Result missing =
      Cli("run --scenario '" + (dir_ / "nope.json").string() + "'");
  EXPECT_EQ(missing.status, 2);

  const fs::path dup = Write("dup.json", R"({"mode": "rbm2d", "t_end": 1,
      "bodies": [{"id": 1, "p": [0, 0], "yaw": 0, "axes": [1, 1]},
                 {"id": 1, "p": [5, 0], "yaw": 0, "axes": [1, 1]}]})");
  EXPECT_EQ(Cli("run --scenario '" + dup.string() + "' --out " + Out()).status,
            2);
}

TEST_F(CliTest, OverlapExitsOne) {
  const fs::path overlap = Write("overlap.json", R"({"mode": "rbm2d",
      "t_end": 1, "bodies": [
        {"id": 1, "p": [0, 0], "yaw": 0, "axes": [1, 0.5],
         "goal": {"p": [3, 0], "yaw": 0}},
        {"id": 2, "p": [1, 0], "yaw": 0, "axes": [1, 0.5],
         "goal": {"p": [-3, 0], "yaw": 0}}]})");
  const Result r =
      Cli("run --scenario '" + overlap.string() + "' --out " + Out());
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.output.find("initial overlap"), std::string::npos) << r.output;
}

TEST_F(CliTest, BundledTwoBodyScenarioRuns) {
  const Result r =
      Cli("run --scenario " + Bundled("two_body_2d.json") + " --out " + Out() +
          " --svg");
  ASSERT_EQ(r.status, 0) << r.output;
  const nlohmann::json summary =
      nlohmann::json::parse(ReadFile(dir_ / "out" / "summary.json"));
  EXPECT_GT(summary["min_h"].get<double>(), 0.0);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "pairs.csv"));
  EXPECT_NE(ReadFile(dir_ / "out" / "h.svg").find("<svg"), std::string::npos);
}

TEST_F(CliTest, OverridesAndDeterminism) {
  const std::string args = "run --scenario " + Bundled("two_body_2d.json") +
                           " --t-end 0.25 --oracle-every 0 --out ";
  ASSERT_EQ(Cli(args + Out("a")).status, 0);
  ASSERT_EQ(Cli(args + Out("b")).status, 0);
  const std::string a = ReadFile(dir_ / "a" / "trajectory.csv");
  EXPECT_EQ(a, ReadFile(dir_ / "b" / "trajectory.csv"));
  EXPECT_EQ(ReadFile(dir_ / "a" / "pairs.csv"),
            ReadFile(dir_ / "b" / "pairs.csv"));
  // 251 steps, two bodies, one header line.
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 2 * 251);
  const nlohmann::json summary =
      nlohmann::json::parse(ReadFile(dir_ / "a" / "summary.json"));
  EXPECT_TRUE(summary["max_h_minus_wstar"].is_null());
}

TEST_F(CliTest, VerifySmokeRun) {
  const Result r = Cli("verify --pairs 10 --out " + Out());
  EXPECT_EQ(r.status, 0) << r.output;
  EXPECT_LT(r.seconds, 5.0);
  const nlohmann::json report =
      nlohmann::json::parse(ReadFile(dir_ / "out" / "verify_report.json"));
  EXPECT_TRUE(report.is_object());
}

TEST_F(CliTest, VerifyCatchesPlantedSignError) {
  const Result r = Exec(ESHIELD_CLI_FLIP_MU, "verify --pairs 10 --out " + Out());
  EXPECT_EQ(r.status, 1) << r.output;
  EXPECT_NE(r.output.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, BenchReportsAllSizes) {
  const Result r = Cli("bench --out " + Out());
  ASSERT_EQ(r.status, 0) << r.output;
  const nlohmann::json bench =
      nlohmann::json::parse(ReadFile(dir_ / "out" / "bench.json"));
  const nlohmann::json& rows = bench["qp_assemble_solve"];
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0]["bodies"].get<int>(), 2);
  EXPECT_EQ(rows[2]["bodies"].get<int>(), 16);
  for (const auto& row : rows) {
    EXPECT_GT(row["median_ms"].get<double>(), 0.0);
    EXPECT_GE(row["p95_ms"].get<double>(), row["median_ms"].get<double>());
  }
  EXPECT_LE(rows[0]["median_ms"].get<double>(),
            rows[2]["median_ms"].get<double>());
}

}  // namespace
