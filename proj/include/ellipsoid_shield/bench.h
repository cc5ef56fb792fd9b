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

#ifndef ELLIPSOID_SHIELD_BENCH_H_
#define ELLIPSOID_SHIELD_BENCH_H_

#include <string>
#include <vector>

#include "ellipsoid_shield/simulator.h"

namespace eshield {

// n ellipsoids on a 3D lattice, each heading to the mirror image of its
// start through the origin. The traffic crosses in the middle.
Scenario BenchScenario(int n, std::uint64_t seed = 1);

struct BenchResult {
  int bodies = 0;
  int samples = 0;
  double median_ms = 0.0;  // per-body assemble + solve
  double p95_ms = 0.0;
};

// Times the per-body QP (assembly and solve) over `steps` closed-loop steps.
BenchResult BenchQp(int n, int steps = 300, std::uint64_t seed = 1);

std::string BenchJson(const std::vector<BenchResult>& results);

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_BENCH_H_
