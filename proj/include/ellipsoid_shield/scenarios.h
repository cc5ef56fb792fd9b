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

#ifndef ELLIPSOID_SHIELD_SCENARIOS_H_
#define ELLIPSOID_SHIELD_SCENARIOS_H_

#include <cstdint>

#include "ellipsoid_shield/simulator.h"

namespace eshield {

// Two ellipses starting at (-3, -3) and (2, 0) with crossing goals. Semi-axes
// are drawn from [1, 2] (major) and [0.4, 0.8] (minor) with the seed.
Scenario TwoBody2dScenario(std::uint64_t seed = 0);

// Sixteen ellipsoids in two 2x2x2 blocks at opposite corners swapping
// corners, with the goal slots and minor axes drawn from the seed. Each body
// points its major axis at its goal.
Scenario SixteenBody3dScenario(std::uint64_t seed = 1);

// Two vehicles driving toward each other on adjacent lanes.
Scenario VehicleScenario();

// An ellipse driving past a fixed elliptical obstacle to the origin.
Scenario ObstacleScenario(double gamma);

// Rotation whose first column is the unit vector u (d = 2 or 3).
Mat AlignedRotation(const Vec& u);

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_SCENARIOS_H_
