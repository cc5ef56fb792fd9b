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

#include "ellipsoid_shield/scenarios.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

namespace eshield {

namespace {

Vec Vec2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

Vec Vec3(double x, double y, double z) {
  Vec v(3);
  v << x, y, z;
  return v;
}

}  // namespace

Mat AlignedRotation(const Vec& u) {
  const Vec e = u.normalized();
  if (e.size() == 2) return PlanarRotation(std::atan2(e(1), e(0)));
  // Complete with the coordinate axis least aligned with e.
  int k = 0;
  e.cwiseAbs().minCoeff(&k);
  Vec helper = Vec::Unit(3, k);
  Vec second = (helper - e * e.dot(helper)).normalized();
  const Eigen::Vector3d third =
      Eigen::Vector3d(e).cross(Eigen::Vector3d(second));
  Mat R(3, 3);
  R.col(0) = e;
  R.col(1) = second;
  R.col(2) = third;
  return R;
}

Scenario TwoBody2dScenario(std::uint64_t seed) {
  Scenario s;
  s.mode = Mode::kRbm2d;
  s.dt = 1e-3;
  s.t_end = 3.5;
  s.seed = seed;
  s.oracle_every = 10;
  s.params.gamma = 10.0;
  s.params.k_z = GainSchedule{20.0, false};
  s.params.k_v = 1.0;
  s.params.k_omega = 0.5;
  s.params.beta_v = 1.0;
  s.params.beta_omega = 0.5;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> major(1.0, 2.0), minor(0.4, 0.8);
  std::uniform_real_distribution<double> yaw(-std::numbers::pi, std::numbers::pi);
  const Vec starts[2] = {Vec2(-3.0, -3.0), Vec2(2.0, 0.0)};
  const Vec goals[2] = {Vec2(3.0, 2.0), Vec2(-4.0, -2.0)};
  for (int k = 0; k < 2; ++k) {
    BodySpec b;
    b.body.id = k + 1;
    const double q1 = major(rng);
    const double q2 = minor(rng);
    b.body.shape.axes = Vec2(q1, q2);
    b.body.pose.p = starts[k];
    b.body.pose.R = PlanarRotation(yaw(rng));
    b.goal = Pose{goals[k], b.body.pose.R};
    s.bodies.push_back(b);
  }
  return s;
}

Scenario SixteenBody3dScenario(std::uint64_t seed) {
  Scenario s;
  s.mode = Mode::kRbm3d;
  s.dt = 1e-3;
  s.t_end = 4.0;
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
  const double spacing = 2.5;
  auto block = [&](double center) {
    std::vector<Vec> slots;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int k = 0; k < 2; ++k) {
          slots.push_back(Vec3(center + (i - 0.5) * spacing,
                               center + (j - 0.5) * spacing,
                               center + (k - 0.5) * spacing));
        }
      }
    }
    return slots;
  };
  const std::vector<Vec> low = block(-4.0);
  const std::vector<Vec> high = block(4.0);
  std::vector<int> perm_low(8), perm_high(8);
  std::iota(perm_low.begin(), perm_low.end(), 0);
  std::iota(perm_high.begin(), perm_high.end(), 0);
  std::shuffle(perm_low.begin(), perm_low.end(), rng);
  std::shuffle(perm_high.begin(), perm_high.end(), rng);
  std::vector<int> ids(16);
  std::iota(ids.begin(), ids.end(), 1);
  std::shuffle(ids.begin(), ids.end(), rng);

  for (int k = 0; k < 16; ++k) {
    BodySpec b;
    b.body.id = ids[k];
    const Vec start = k < 8 ? low[k] : high[k - 8];
    const Vec goal = k < 8 ? high[perm_high[k]] : low[perm_low[k - 8]];
    const double q2 = minor(rng);
    const double q3 = minor(rng);
    b.body.shape.axes = Vec3(1.0, q2, q3);
    b.body.pose.p = start;
    b.body.pose.R = AlignedRotation(goal - start);
    b.goal = Pose{goal, b.body.pose.R};
    s.bodies.push_back(b);
  }
  std::sort(s.bodies.begin(), s.bodies.end(),
            [](const BodySpec& a, const BodySpec& b) {
              return a.body.id < b.body.id;
            });
  return s;
}

Scenario VehicleScenario() {
  Scenario s;
  s.mode = Mode::kVehicle2d;
  s.dt = 1e-3;
  s.t_end = 8.0;
  s.seed = 0;
  s.oracle_every = 10;
  s.params.k_z = GainSchedule{1000.0, true};
  s.params.beta_a = 1.0;
  s.params.beta_steer = 10.0;
  s.params.cruise_speed = 5.0;
  s.params.z_rate_limit = std::numbers::pi / 3.0;
  s.vehicle = VehicleParams{2.7, 0.5};
  const double lane = 1.5;
  for (int k = 0; k < 2; ++k) {
    BodySpec b;
    b.body.id = k + 1;
    const double side = k == 0 ? -1.0 : 1.0;
    b.body.shape.axes = Vec2(4.0, 2.0);
    b.body.pose.p = Vec2(15.0 * side, lane * side);
    b.body.pose.R = PlanarRotation(k == 0 ? 0.0 : std::numbers::pi);
    b.path = LinePath{Vec2(0.0, lane * side), Vec2(-side, 0.0)};
    b.speed = 5.0;
    b.steering = 0.0;
    s.bodies.push_back(b);
  }
  return s;
}

Scenario ObstacleScenario(double gamma) {
  Scenario s;
  s.mode = Mode::kRbm2d;
  s.dt = 1e-3;
  s.t_end = 15.0;
  s.seed = 0;
  s.oracle_every = 10;
  s.params.gamma = gamma;
  s.params.k_z = GainSchedule{10.0, false};
  s.params.k_v = 1.0;
  s.params.k_omega = 0.5;
  s.params.beta_v = 1.0;
  s.params.beta_omega = 0.3;

  BodySpec robot;
  robot.body.id = 1;
  robot.body.shape.axes = Vec2(0.5, 0.2);
  robot.body.pose = Pose{Vec2(12.0, 0.0), Mat::Identity(2, 2)};
  robot.goal = Pose{Vec2(0.0, 0.0), Mat::Identity(2, 2)};
  s.bodies.push_back(robot);

  BodySpec obstacle;
  obstacle.body.id = 2;
  obstacle.body.shape.axes = Vec2(3.0, 2.0);
  obstacle.body.pose = Pose{Vec2(6.0, 0.5), Mat::Identity(2, 2)};
  obstacle.is_static = true;
  s.bodies.push_back(obstacle);
  return s;
}

}  // namespace eshield
