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

#ifndef ELLIPSOID_SHIELD_SIMULATOR_H_
#define ELLIPSOID_SHIELD_SIMULATOR_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ellipsoid_shield/controllers.h"
#include "ellipsoid_shield/dynamics.h"
#include "ellipsoid_shield/geometry.h"
#include "ellipsoid_shield/vehicle_barrier.h"

namespace eshield {

enum class Mode { kRbm2d, kRbm3d, kVehicle2d };

const char* ModeName(Mode mode);
int ModeDimension(Mode mode);

// Raised for scenarios that cannot be simulated (e.g. initial overlap).
class ScenarioError : public std::invalid_argument {
 public:
  explicit ScenarioError(const std::string& what)
      : std::invalid_argument(what) {}
};

struct BodySpec {
  ShapedBody body;
  bool is_static = false;
  std::optional<Pose> goal;      // rigid body modes
  std::optional<LinePath> path;  // vehicle mode
  double speed = 0.0;            // vehicle mode
  double steering = 0.0;         // vehicle mode
};

struct Scenario {
  Mode mode = Mode::kRbm2d;
  double dt = 1e-3;
  double t_end = 1.0;
  std::uint64_t seed = 0;
  int oracle_every = 10;  // 0 disables the distance audit
  ControllerParams params;
  VehicleParams vehicle;
  std::vector<BodySpec> bodies;

  int dim() const { return ModeDimension(mode); }
};

// Checks sizes, unique ids, static bodies after all movable ones, goals and
// paths. Throws ScenarioError.
void ValidateScenario(const Scenario& scenario);

// Number of integration steps: ceil(t_end / dt), robust to rounding.
int StepCount(double t_end, double dt);

struct BodyRecord {
  Pose pose;
  BodyVelocity velocity;  // applied body velocity
  double speed = 0.0;     // vehicle mode
  double steering = 0.0;  // vehicle mode
};

struct PairRecord {
  Vec z;
  double h = 0.0;
  double hdot = 0.0;
  // hdot + gamma h for rigid bodies; hddot + 2 hdot + h for vehicles. The
  // barrier condition asks for this to stay non-negative.
  double margin = 0.0;
  double w_star = 0.0;
  bool audited = false;
};

struct QpStats {
  double time_ms = 0.0;  // assemble + solve
  int active = 0;
  int iterations = 0;
  double kkt_residual = 0.0;
};

struct StepRecord {
  double t = 0.0;
  std::vector<BodyRecord> bodies;
  std::vector<PairRecord> pairs;
  std::vector<QpStats> qp;  // one per movable body
};

struct RunSummary {
  double min_h = 0.0;
  std::optional<double> max_h_minus_wstar;  // max of h - w* over audits
  double max_abs_h_minus_wstar = 0.0;
  std::vector<double> goal_errors;
  double qp_time_median_ms = 0.0;
  double min_margin = 0.0;
  double max_rotation_drift = 0.0;  // before re-orthonormalization
  double max_z_norm_error = 0.0;
  bool safety_violated = false;  // some h below -1e-4
  bool aborted = false;
  std::string diagnostic;
};

struct TrajectoryLog {
  Mode mode = Mode::kRbm2d;
  int dim = 2;
  std::vector<int> body_ids;
  std::vector<std::pair<int, int>> pair_ids;  // (owner id, other id)
  std::vector<StepRecord> steps;
  RunSummary summary;
};

struct SimulationOptions {
  int threads = 1;
};

// Initial hyperplanes for every pair with at least one movable body, in
// (owner, other) lexicographic order of body indices after sorting by id.
// Throws ScenarioError on overlapping initial bodies.
std::vector<PairChannel> WarmStart(const Scenario& scenario);

// Runs the closed loop. QP failures stop the run early with
// summary.aborted set; invalid scenarios throw ScenarioError.
TrajectoryLog Run(const Scenario& scenario,
                  const SimulationOptions& options = {});

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_SIMULATOR_H_
