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

// Writes the bundled scenario files: make_scenarios <output dir>.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "ellipsoid_shield/scenario_io.h"
#include "ellipsoid_shield/scenarios.h"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_scenarios <output dir>\n";
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  std::filesystem::create_directories(dir);
  const std::vector<std::pair<std::string, eshield::Scenario>> files = {
      {"two_body_2d.json", eshield::TwoBody2dScenario(0)},
      {"sixteen_body_3d.json", eshield::SixteenBody3dScenario(1)},
      {"vehicle_2d.json", eshield::VehicleScenario()},
      {"obstacle_gamma1.json", eshield::ObstacleScenario(1.0)},
      {"obstacle_gamma10.json", eshield::ObstacleScenario(10.0)},
      {"obstacle_gamma100.json", eshield::ObstacleScenario(100.0)},
  };
  for (const auto& [name, scenario] : files) {
    std::ofstream out(dir / name);
    out << eshield::ScenarioToJson(scenario);
    if (!out) {
      std::cerr << "cannot write " << (dir / name) << "\n";
      return 1;
    }
  }
  return 0;
}
