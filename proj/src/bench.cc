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

#include "ellipsoid_shield/bench.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "ellipsoid_shield/scenarios.h"

namespace eshield {

Scenario BenchScenario(int n, std::uint64_t seed) {
  Scenario s;
  s.mode = Mode::kRbm3d;
  s.dt = 1e-3;
  s.seed = seed;
  s.oracle_every = 0;
  s.params.gamma = 10.0;
  s.params.k_z = GainSchedule{20.0, true};
  s.params.k_v = 3.0;
  s.params.k_omega = 0.5;
  s.params.beta_v = 0.1;
  s.params.beta_omega = 1.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> minor(0.3, 0.7);
  const int side = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n))));
  const double spacing = 3.0;
  for (int k = 0; k < n; ++k) {
    const int ix = k % side, iy = (k / side) % side, iz = k / (side * side);
    Vec p(3);
    p << (ix - 0.5 * (side - 1)) * spacing + 0.3 * iy,
        (iy - 0.5 * (side - 1)) * spacing + 0.2 * iz,
        (iz - 0.5 * (side - 1)) * spacing + 0.1 * ix;
    if (p.norm() < 1e-9) p(0) += 0.5 * spacing;
    const Vec goal = -p;
    BodySpec b;
    b.body.id = k + 1;
    b.body.shape.axes = Vec(3);
    b.body.shape.axes << 1.0, minor(rng), minor(rng);
    b.body.pose.p = p;
    b.body.pose.R = AlignedRotation(goal - p);
    b.goal = Pose{goal, b.body.pose.R};
    s.bodies.push_back(b);
  }
  return s;
}

BenchResult BenchQp(int n, int steps, std::uint64_t seed) {
  Scenario s = BenchScenario(n, seed);
  s.t_end = steps * s.dt;
  const TrajectoryLog log = Run(s);
  std::vector<double> times;
  for (const StepRecord& rec : log.steps) {
    for (const QpStats& q : rec.qp) times.push_back(q.time_ms);
  }
  BenchResult r;
  r.bodies = n;
  r.samples = static_cast<int>(times.size());
  if (times.empty()) return r;
  std::sort(times.begin(), times.end());
  r.median_ms = times[times.size() / 2];
  r.p95_ms = times[std::min(times.size() - 1,
                            static_cast<size_t>(0.95 * times.size()))];
  return r;
}

std::string BenchJson(const std::vector<BenchResult>& results) {
  std::string out = "{\n  \"qp_assemble_solve\": [\n";
  char buf[200];
  for (size_t k = 0; k < results.size(); ++k) {
    const BenchResult& r = results[k];
    std::snprintf(buf, sizeof(buf),
                  "    {\"bodies\": %d, \"samples\": %d, \"median_ms\": %.17g, "
                  "\"p95_ms\": %.17g}",
                  r.bodies, r.samples, r.median_ms, r.p95_ms);
    out += buf;
    out += k + 1 < results.size() ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

}  // namespace eshield
