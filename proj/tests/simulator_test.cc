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

#include "ellipsoid_shield/simulator.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ellipsoid_shield/distance_oracle.h"
#include "ellipsoid_shield/scenarios.h"
#include "test_util.h"

namespace eshield {
namespace {

using testing::V;

BodySpec Ellipse(int id, double x, double y, double yaw, double a, double b) {
  BodySpec s;
  s.body.id = id;
  s.body.pose.p = V({x, y});
  s.body.pose.R = PlanarRotation(yaw);
  s.body.shape.axes = V({a, b});
  return s;
}

Pose Goal2d(double x, double y, double yaw) {
  Pose g;
  g.p = V({x, y});
  g.R = PlanarRotation(yaw);
  return g;
}

Scenario Planar(std::vector<BodySpec> bodies, double t_end) {
  Scenario s;
  s.mode = Mode::kRbm2d;
  s.dt = 1e-3;
  s.t_end = t_end;
  s.bodies = std::move(bodies);
  return s;
}

void ExpectIdentical(const TrajectoryLog& a, const TrajectoryLog& b) {
  ASSERT_EQ(a.steps.size(), b.steps.size());
  for (size_t k = 0; k < a.steps.size(); ++k) {
    for (size_t i = 0; i < a.steps[k].bodies.size(); ++i) {
      ASSERT_EQ(a.steps[k].bodies[i].pose.p, b.steps[k].bodies[i].pose.p);
      ASSERT_EQ(a.steps[k].bodies[i].pose.R, b.steps[k].bodies[i].pose.R);
    }
    for (size_t c = 0; c < a.steps[k].pairs.size(); ++c) {
      ASSERT_EQ(a.steps[k].pairs[c].z, b.steps[k].pairs[c].z);
      ASSERT_EQ(a.steps[k].pairs[c].h, b.steps[k].pairs[c].h);
    }
  }
  EXPECT_EQ(a.summary.min_h, b.summary.min_h);
}

TEST(StepCount, RoundsUpRobustly) {
  EXPECT_EQ(StepCount(1.0, 1e-3), 1000);
  EXPECT_EQ(StepCount(0.3, 0.1), 3);
  EXPECT_EQ(StepCount(0.0105, 1e-3), 11);
  EXPECT_EQ(StepCount(10.0, 1e-3), 10000);
}

TEST(Run, RecordsEveryStep) {
  Scenario s = Planar({Ellipse(0, 0, 0, 0, 1, 0.5)}, 0.0105);
  s.bodies[0].goal = Goal2d(1, 0, 0);
  const TrajectoryLog log = eshield::Run(s);
  ASSERT_EQ(log.steps.size(), 12u);
  EXPECT_EQ(log.steps.front().t, 0.0);
  EXPECT_NEAR(log.steps.back().t, 0.011, 1e-15);
}

TEST(Run, DeterministicAcrossRunsAndThreads) {
  Scenario s = TwoBody2dScenario(0);
  s.t_end = 0.5;
  const TrajectoryLog a = eshield::Run(s);
  const TrajectoryLog b = eshield::Run(s);
  SimulationOptions two;
  two.threads = 2;
  const TrajectoryLog c = eshield::Run(s, two);
  ExpectIdentical(a, b);
  ExpectIdentical(a, c);
}

TEST(Run, SingleBodyFollowsNominalLaw) {
  // v = k_v R^T (goal - p) with a fixed heading: p(t) = goal + e^-t (p0 - goal).
  Scenario s = Planar({Ellipse(0, 2, -1, 0, 1, 0.5)}, 1.0);
  s.bodies[0].goal = Goal2d(0, 0, 0);
  const TrajectoryLog log = eshield::Run(s);
  const Vec p = log.steps.back().bodies[0].pose.p;
  const double decay = std::pow(1.0 - 1e-3, 1000);
  EXPECT_LE((p - V({2, -1}) * decay).norm(), 1e-12);
  EXPECT_TRUE(log.pair_ids.empty());
  EXPECT_TRUE(std::isinf(log.summary.min_h));
}

TEST(Run, DistantBodiesKeepNominalInputs) {
  Scenario s = Planar({Ellipse(0, 0, 0, 0.3, 1, 0.5),
                       Ellipse(1, 100, 0, -0.2, 1, 0.5)},
                      0.01);
  s.bodies[0].goal = Goal2d(0, 5, 0.5);
  s.bodies[1].goal = Goal2d(100, -5, 0.0);
  const TrajectoryLog log = eshield::Run(s);
  for (int k = 0; k < 2; ++k) {
    const BodyVelocity nominal =
        NominalPoseInput(s.bodies[k].body, *s.bodies[k].goal,
                         s.params.k_v, s.params.k_omega);
    const BodyRecord& rec = log.steps.front().bodies[k];
    EXPECT_LE((rec.velocity.v - nominal.v).norm(), 1e-12);
    EXPECT_LE((rec.velocity.omega - nominal.omega).norm(), 1e-12);
  }
}

TEST(Run, HeadOnBodiesStaySeparated) {
  Scenario s = Planar({Ellipse(0, -3, 0, 0, 1, 0.5),
                       Ellipse(1, 3, 0.2, 0, 1, 0.5)},
                      4.0);
  s.bodies[0].goal = Goal2d(3, 0, 0);
  s.bodies[1].goal = Goal2d(-3, 0, 0);
  const TrajectoryLog log = eshield::Run(s);
  EXPECT_FALSE(log.summary.aborted);
  EXPECT_GT(log.summary.min_h, 0.0);
  EXPECT_GE(log.summary.min_margin, -1e-6);
  EXPECT_FALSE(log.summary.safety_violated);
  EXPECT_LE(log.summary.max_z_norm_error, 1e-14);
  // Bodies stay on opposite sides of the true separating distance.
  for (const StepRecord& step : log.steps) {
    for (const PairRecord& pr : step.pairs) {
      if (pr.audited) {
        ASSERT_LE(pr.h, pr.w_star + 1e-9);
      }
    }
  }
}

TEST(Run, StaticObstacleNeverMoves) {
  Scenario s = ObstacleScenario(10.0);
  s.t_end = 1.0;
  const TrajectoryLog log = eshield::Run(s);
  const int last = static_cast<int>(log.body_ids.size()) - 1;
  EXPECT_EQ(log.steps.back().bodies[last].pose.p,
            log.steps.front().bodies[last].pose.p);
  EXPECT_EQ(log.steps.back().bodies[last].velocity.v.norm(), 0.0);
  EXPECT_EQ(log.steps.front().qp.size(), log.body_ids.size() - 1);
}

TEST(Run, InitialOverlapIsRejected) {
  Scenario s = Planar({Ellipse(0, 0, 0, 0, 1, 0.5),
                       Ellipse(1, 1, 0, 0, 1, 0.5)},
                      1.0);
  EXPECT_THROW(eshield::Run(s), ScenarioError);
  try {
    WarmStart(s);
    FAIL();
  } catch (const ScenarioError& e) {
    EXPECT_NE(std::string(e.what()).find("initial overlap"), std::string::npos);
  }
}

TEST(ValidateScenario, RejectsMalformedScenarios) {
  const Scenario good = Planar({Ellipse(0, 0, 0, 0, 1, 0.5),
                                Ellipse(1, 5, 0, 0, 1, 0.5)},
                               1.0);
  EXPECT_NO_THROW(ValidateScenario(good));

  Scenario s = good;
  s.bodies[1].body.id = 0;
  EXPECT_THROW(ValidateScenario(s), ScenarioError);

  s = good;
  s.dt = 0.0;
  EXPECT_THROW(ValidateScenario(s), ScenarioError);

  s = good;
  s.t_end = -1.0;
  EXPECT_THROW(ValidateScenario(s), ScenarioError);

  s = good;
  s.bodies[0].is_static = true;  // static before a movable body
  EXPECT_THROW(ValidateScenario(s), ScenarioError);

  s = good;
  s.bodies[0].body.shape.axes = V({1, -0.5});
  EXPECT_THROW(ValidateScenario(s), ScenarioError);

  s = good;
  s.mode = Mode::kRbm3d;
  EXPECT_THROW(ValidateScenario(s), ScenarioError);

  s = good;
  s.mode = Mode::kVehicle2d;  // no paths
  EXPECT_THROW(ValidateScenario(s), ScenarioError);

  s = good;
  s.bodies.clear();
  EXPECT_THROW(ValidateScenario(s), ScenarioError);

  s = good;
  s.params.gamma = -1.0;
  EXPECT_THROW(ValidateScenario(s), ScenarioError);
}

TEST(WarmStart, SixteenBodies) {
  const Scenario s = SixteenBody3dScenario();
  const std::vector<PairChannel> channels = WarmStart(s);
  ASSERT_EQ(channels.size(), 120u);
  int k = 0;
  for (int i = 0; i < 16; ++i) {
    for (int j = i + 1; j < 16; ++j, ++k) {
      ASSERT_EQ(channels[k].owner, i);
      ASSERT_EQ(channels[k].other, j);
      ASSERT_GT(channels[k].last_h, 0.0);
      ASSERT_LE(std::abs(channels[k].z.norm() - 1.0), 1e-12);
    }
  }
}

TEST(WarmStart, SkipsStaticPairs) {
  Scenario s = Planar({Ellipse(0, 0, 0, 0, 1, 0.5), Ellipse(1, 5, 0, 0, 1, 0.5),
                       Ellipse(2, -5, 0, 0, 1, 0.5)},
                      1.0);
  s.bodies[1].is_static = true;
  s.bodies[2].is_static = true;
  const std::vector<PairChannel> channels = WarmStart(s);
  ASSERT_EQ(channels.size(), 2u);
  EXPECT_EQ(channels[0].owner, 0);
  EXPECT_EQ(channels[1].owner, 0);
}

TEST(WarmStart, HyperplaneIsNearOptimal) {
  const Scenario s = TwoBody2dScenario(0);
  const std::vector<PairChannel> channels = WarmStart(s);
  ASSERT_EQ(channels.size(), 1u);
  const double w = MinDistance(s.bodies[0].body, s.bodies[1].body).distance;
  EXPECT_NEAR(channels[0].last_h, w, 1e-6);
}

}  // namespace
}  // namespace eshield
