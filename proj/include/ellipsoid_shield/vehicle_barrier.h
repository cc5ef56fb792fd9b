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

#ifndef ELLIPSOID_SHIELD_VEHICLE_BARRIER_H_
#define ELLIPSOID_SHIELD_VEHICLE_BARRIER_H_

#include <Eigen/Dense>

#include "ellipsoid_shield/controllers.h"
#include "ellipsoid_shield/dynamics.h"
#include "ellipsoid_shield/geometry.h"
#include "ellipsoid_shield/separation.h"

namespace eshield {

// Directed line to be traced.
struct LinePath {
  Vec point;
  Vec direction;  // unit
};

// Signed distance of the pose position from the line, positive to the left
// of its direction.
double LateralError(const Pose& pose, const LinePath& path);

// sin of the heading relative to the line: vee of the antisymmetric part of
// R_line^T R.
double HeadingError(const Pose& pose, const LinePath& path);

struct VehicleInput {
  double u_a = 0.0;  // speed rate, m/s^2
  double u_w = 0.0;  // steering rate, rad/s
};

// u_a = -(v - cruise), u_w = -0.1 e1 - e2 - 1.5 phi.
VehicleInput VehicleNominal(const VehicleState& state, const LinePath& path,
                            double cruise_speed = 5.0);

// Second-order barrier quantities for one vehicle pair with hyperplane state
// (z, r) owned by vehicle i. With zero inputs
//   hddot = A + owner_input (u_a_i, u_w_i) + mu_proj u_r
//             + other_input (u_a_j, u_w_j).
struct VehiclePairTerms {
  CbfCoefficients coeffs;
  double h = 0.0;
  double hdot = 0.0;
  double drift = 0.0;  // A: the part of hddot that does not depend on inputs
  Eigen::RowVector2d owner_input;
  Eigen::RowVector2d other_input;
  RowVec mu_proj;  // mu (I - z z^T)
  Vec mu_rate;     // time derivative of mu^T along the current motion
};

VehiclePairTerms AnalyzeVehiclePair(const EllipsoidShape& shape_i,
                                    const VehicleState& state_i,
                                    const EllipsoidShape& shape_j,
                                    const VehicleState& state_j,
                                    const SecondOrderHyperplane& zr,
                                    const VehicleParams& params);

// Nominal u_r: rate of the target r_ref = sat(k_z (I - z z^T) mu^T), where
// sat scales to norm `rate_limit` when longer. Below the limit this is
// k_z d/dt((I - z z^T) mu^T) with k_z held fixed; on the limit only the
// direction of r_ref turns.
Vec NominalHyperplaneInput(const VehiclePairTerms& terms,
                           const SecondOrderHyperplane& zr, double k_z,
                           double rate_limit);

// hdot of the pair at the current bicycle-model velocities and r.
double VehicleHDot(const EllipsoidShape& shape_i, const VehicleState& state_i,
                   const EllipsoidShape& shape_j, const VehicleState& state_j,
                   const SecondOrderHyperplane& zr,
                   const VehicleParams& params);

// The barrier h_veh = hdot + h must satisfy hdot_veh >= -h_veh; each side
// takes half: owner over (u_a, u_w, u_r), non-owner over (u_a, u_w), both
// with right side -(A + 2 hdot + h) / 2.
LinearConstraint VehicleOwnerConstraint(const VehiclePairTerms& terms,
                                        double share = 0.5);
LinearConstraint VehicleOtherConstraint(const VehiclePairTerms& terms);

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_VEHICLE_BARRIER_H_
