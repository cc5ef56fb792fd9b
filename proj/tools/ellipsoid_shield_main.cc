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

// Batch driver: run scenarios, verification campaigns and QP benchmarks.
//
//   ellipsoid_shield run --scenario scenarios/two_body_2d.json --out out/
//   ellipsoid_shield verify --pairs 500 --out out/
//   ellipsoid_shield bench --out out/
//
// Exit status: 0 success, 1 runtime or tolerance failure, 2 usage or parse
// error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ellipsoid_shield/bench.h"
#include "ellipsoid_shield/parallel.h"
#include "ellipsoid_shield/scenario_io.h"
#include "ellipsoid_shield/simulator.h"
#include "ellipsoid_shield/verify.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct RunConfig {
  std::string scenario;
  std::string out = ".";
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
  std::optional<int> oracle_every;
  std::optional<int> pairs;
  bool svg = false;
};

bool PrepareOut(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << dir << ": "
              << ec.message() << "\n";
    return false;
  }
  return true;
}

std::string Join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

int CmdRun(const RunConfig& cfg) {
  eshield::Scenario scenario;
  try {
    scenario = eshield::LoadScenario(cfg.scenario);
  } catch (const eshield::ScenarioParseError& e) {
    std::cerr << "error: " << cfg.scenario << ": parse error at '"
              << e.location() << "': " << e.what() << "\n";
    return kExitUsage;
  }
  if (cfg.dt) scenario.dt = *cfg.dt;
  if (cfg.t_end) scenario.t_end = *cfg.t_end;
  if (cfg.seed) scenario.seed = *cfg.seed;
  if (cfg.oracle_every) scenario.oracle_every = *cfg.oracle_every;
  try {
    eshield::ValidateScenario(scenario);
  } catch (const eshield::ScenarioError& e) {
    std::cerr << "error: " << cfg.scenario << ": invalid scenario: " << e.what()
              << "\n";
    return kExitUsage;
  }
  if (!PrepareOut(cfg.out)) return kExitFailure;

  eshield::TrajectoryLog log;
  try {
    eshield::SimulationOptions options;
    options.threads = eshield::ThreadCountFromEnv();
    log = eshield::Run(scenario, options);
  } catch (const eshield::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: simulation failed: " << e.what() << "\n";
    return kExitFailure;
  }
  try {
    eshield::WriteTrajectoryCsv(log, Join(cfg.out, "trajectory.csv"));
    eshield::WritePairsCsv(log, scenario.oracle_every > 0,
                           Join(cfg.out, "pairs.csv"));
    eshield::WriteSummaryJson(log.summary, Join(cfg.out, "summary.json"));
    if (cfg.svg) eshield::WriteHPlotSvg(log, Join(cfg.out, "h.svg"));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  const eshield::RunSummary& s = log.summary;
  std::printf("steps=%zu min_h=%.6g min_margin=%.3g qp_median_ms=%.4f\n",
              log.steps.size(), s.min_h, s.min_margin, s.qp_time_median_ms);
  if (s.aborted) {
    std::cerr << "error: " << s.diagnostic << "\n";
    return kExitFailure;
  }
  if (s.safety_violated) {
    std::cerr << "error: safety violation, min h = " << s.min_h << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int CmdVerify(const RunConfig& cfg) {
  eshield::VerifyOptions options;
  if (cfg.pairs) {
    if (*cfg.pairs < 1) {
      std::cerr << "error: --pairs must be >= 1\n";
      return kExitUsage;
    }
    options.pairs_per_dim = *cfg.pairs;
    options.weak_samples = 20 * *cfg.pairs;
    options.fd_configs_per_dim = std::min(100, *cfg.pairs);
    options.qp_problems = 2 * *cfg.pairs;
  }
  if (cfg.seed) options.seed = *cfg.seed;
  options.threads = eshield::ThreadCountFromEnv();
#ifdef ELLIPSOID_SHIELD_FLIP_MU
  // Mutation build for testing the campaign itself.
  options.coefficient_hook = [](eshield::CbfCoefficients& c) { c.mu = -c.mu; };
#endif
  if (!PrepareOut(cfg.out)) return kExitFailure;
  const eshield::VerifyReport report = eshield::RunVerification(options);
  for (const eshield::SuiteResult& s : report.suites) {
    std::printf("%-20s %s cases=%d worst=%.3e tol=%.1e seed=%llu (%.2fs)\n",
                s.name.c_str(), s.pass ? "PASS" : "FAIL", s.cases, s.worst,
                s.tolerance, static_cast<unsigned long long>(s.worst_seed),
                s.seconds);
  }
  std::ofstream out(Join(cfg.out, "verify_report.json"));
  out << eshield::VerifyReportJson(report);
  if (!out) {
    std::cerr << "error: cannot write verify_report.json\n";
    return kExitFailure;
  }
  return report.pass ? kExitOk : kExitFailure;
}

int CmdBench(const RunConfig& cfg) {
  if (!PrepareOut(cfg.out)) return kExitFailure;
  std::vector<eshield::BenchResult> results;
  for (const int n : {2, 8, 16}) {
    results.push_back(eshield::BenchQp(n, 300, cfg.seed.value_or(1)));
    const eshield::BenchResult& r = results.back();
    std::printf("n=%-3d samples=%-6d median=%.4f ms p95=%.4f ms\n", r.bodies,
                r.samples, r.median_ms, r.p95_ms);
  }
  std::ofstream out(Join(cfg.out, "bench.json"));
  out << eshield::BenchJson(results);
  return out ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collision avoidance for ellipsoidal rigid bodies"};
  app.require_subcommand(1);
  RunConfig cfg;

  CLI::App* run = app.add_subcommand("run", "Simulate a scenario file");
  run->add_option("--scenario", cfg.scenario, "Scenario JSON file")
      ->required();
  run->add_option("--out", cfg.out, "Output directory");
  run->add_option("--dt", cfg.dt, "Step size override, seconds")
      ->check(CLI::PositiveNumber);
  run->add_option("--t-end", cfg.t_end, "Duration override, seconds")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", cfg.seed, "Seed override");
  run->add_option("--oracle-every", cfg.oracle_every,
                  "Distance audit period in steps (0 = off)")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("--svg", cfg.svg, "Also write h.svg");

  CLI::App* verify =
      app.add_subcommand("verify", "Randomized numerical verification");
  verify->add_option("--pairs", cfg.pairs, "Random pairs per dimension");
  verify->add_option("--seed", cfg.seed, "Campaign seed");
  verify->add_option("--out", cfg.out, "Output directory");

  CLI::App* bench = app.add_subcommand("bench", "Time per-body QPs");
  bench->add_option("--seed", cfg.seed, "Scenario seed");
  bench->add_option("--out", cfg.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  if (run->parsed()) return CmdRun(cfg);
  if (verify->parsed()) return CmdVerify(cfg);
  return CmdBench(cfg);
}
