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

#ifndef ELLIPSOID_SHIELD_SCENARIO_IO_H_
#define ELLIPSOID_SHIELD_SCENARIO_IO_H_

#include <stdexcept>
#include <string>

#include "ellipsoid_shield/simulator.h"

namespace eshield {

// Malformed scenario document. `location` is a JSON pointer to the offending
// value ("" for the whole document).
class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(const std::string& location, const std::string& message)
      : std::runtime_error(location.empty() ? message
                                            : location + ": " + message),
        location_(location) {}

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

// Parses the JSON scenario format:
//   {"mode": "rbm2d" | "rbm3d" | "vehicle2d", "dt": s, "t_end": s,
//    "seed": n, "oracle_every": n, "params": {...},
//    "bodies": [{"id", "p", "R" (row-major) | "yaw", "axes",
//                "goal": {"p", "R" | "yaw"}, "path": {"point", "direction"},
//                "static", "speed", "steering"}]}
// Unknown keys are rejected. Semantic checks are left to ValidateScenario.
Scenario ParseScenario(const std::string& text);
Scenario LoadScenario(const std::string& path);

std::string ScenarioToJson(const Scenario& scenario);

// Output artifacts. Numbers are printed with 17 significant digits.
std::string TrajectoryCsvHeader(Mode mode, int d);
std::string PairsCsvHeader(int d, bool with_oracle);
void WriteTrajectoryCsv(const TrajectoryLog& log, const std::string& path);
void WritePairsCsv(const TrajectoryLog& log, bool with_oracle,
                   const std::string& path);
// Keys: min_h, max_h_minus_wstar (null without audits), goal_errors,
// qp_time_median_ms.
std::string SummaryJson(const RunSummary& summary);
void WriteSummaryJson(const RunSummary& summary, const std::string& path);

// Static SVG plot of h over time, one polyline per pair.
void WriteHPlotSvg(const TrajectoryLog& log, const std::string& path);

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_SCENARIO_IO_H_
