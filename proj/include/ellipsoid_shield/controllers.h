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

#ifndef ELLIPSOID_SHIELD_CONTROLLERS_H_
#define ELLIPSOID_SHIELD_CONTROLLERS_H_

#include <vector>

#include <Eigen/Dense>

#include "ellipsoid_shield/geometry.h"
#include "ellipsoid_shield/qp.h"
#include "ellipsoid_shield/separation.h"

namespace eshield {

// Hyperplane gain k, optionally scheduled as k / (1 + h^2).
struct GainSchedule {
  double k = 1.0;
  bool scheduled = false;

  double Value(double h) const { return scheduled ? k / (1.0 + h * h) : k; }
};

struct ControllerParams {
  double gamma = 10.0;  // alpha(h) = gamma h
  GainSchedule k_z{20.0, false};
  double k_v = 1.0;
  double k_omega = 0.5;
  double beta_v = 1.0;
  double beta_omega = 0.5;
  // Vehicle mode: weights on (u_a, u_w) and the cruise speed of the nominal
  // speed law.
  double beta_a = 1.0;
  double beta_steer = 10.0;
  double cruise_speed = 5.0;
  double z_rate_limit = 1.0471975511965976;  // pi / 3
  double split = 0.5;
};

// Throws std::invalid_argument on non-positive gains or weights, or a split
// other than 0.5.
void ValidateControllerParams(const ControllerParams& params);

// Hyperplane shared by bodies `owner` < `other` (indices into the body list,
// which is sorted by id). The owner integrates z.
struct PairChannel {
  int owner = 0;
  int other = 0;
  Vec z;
  Vec r;  // only used in vehicle mode
  double last_h = 0.0;
};

// Per-pair quantities computed once per step from the shared snapshot.
struct PairData {
  CbfCoefficients coeffs;
  double h = 0.0;
  Vec u_z_nominal;
};

// v = k_v R^T (p_goal - p), w = (k_w / 2) vee(R^T R_goal - R_goal^T R).
BodyVelocity NominalPoseInput(const ShapedBody& body, const Pose& goal,
                              double k_v, double k_omega);

// k_z(h) times the (unprojected) gradient of h in z.
Vec NominalZInput(const ShapedBody& body_i, const ShapedBody& body_j,
                  const Vec& z, const GainSchedule& k_z);

struct LinearConstraint {
  Eigen::RowVectorXd a;
  double b = 0.0;
};

// Owner side over (v, w, u_z): eta R_i v + zeta' w + mu (I - z z^T) u_z
// >= -share gamma h, where zeta' is the angular row of OwnerAngularRow.
// `share` is 0.5 normally and 1 when the other body cannot act.
LinearConstraint OwnerConstraint(const CbfCoefficients& c,
                                 const ShapedBody& owner, const Vec& z,
                                 double h, double gamma, double share = 0.5);

// Non-owner side over (v, w): xi R_j v + nu' w >= -gamma h / 2.
LinearConstraint OtherConstraint(const CbfCoefficients& c,
                                 const ShapedBody& other, double h,
                                 double gamma);

// Body QP with its variable layout: (v, w, then u_z for each owned channel).
struct BodyQp {
  QpProblem problem;
  std::vector<int> owned_channels;  // order of the u_z blocks
  std::vector<int> row_channels;    // channel of each constraint row
};

// Builds the QP of body `index`. `movable[k]` is false for static bodies,
// which never act. `nominal` is the body's nominal velocity.
BodyQp AssembleBodyQp(int index, const std::vector<ShapedBody>& bodies,
                      const std::vector<bool>& movable,
                      const std::vector<PairChannel>& channels,
                      const std::vector<PairData>& pair_data,
                      const BodyVelocity& nominal,
                      const ControllerParams& params);

// Splits a solution of AssembleBodyQp back into the body velocity and the
// hyperplane inputs of the owned channels.
BodyVelocity BodyInputFromSolution(const Eigen::VectorXd& u, int d);
Vec ChannelInputFromSolution(const Eigen::VectorXd& u, int d, int block);

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_CONTROLLERS_H_
