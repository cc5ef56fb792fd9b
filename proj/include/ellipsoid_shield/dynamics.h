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

#ifndef ELLIPSOID_SHIELD_DYNAMICS_H_
#define ELLIPSOID_SHIELD_DYNAMICS_H_

#include <stdexcept>
#include <string>

#include "ellipsoid_shield/geometry.h"

namespace eshield {

inline constexpr double kDefaultZRateLimit = 1.0471975511965976;  // pi / 3

// Raised for a vehicle state outside the model's domain (|steering| >= pi/2).
class InvalidState : public std::invalid_argument {
 public:
  explicit InvalidState(const std::string& what)
      : std::invalid_argument(what) {}
};

struct VehicleParams {
  double wheelbase = 2.7;  // meters
  double cm_ratio = 0.5;   // center-of-mass position along the wheelbase
};

void ValidateVehicleParams(const VehicleParams& params);

struct VehicleState {
  Pose pose;            // d = 2
  double speed = 0.0;   // m/s
  double steering = 0.0;  // rad
};

// Unit vector z with a velocity-level auxiliary state r, zdot = (I - z z^T) r.
struct SecondOrderHyperplane {
  Vec z;
  Vec r;
};

// Exact SE(d) exponential step: R <- R exp(w dt), p <- p + R Gamma(w dt) v dt,
// followed by polar re-orthonormalization. `drift`, when given, receives the
// orthonormality error of the rotation before that correction.
Pose RbmStep(const Pose& pose, const BodyVelocity& velocity, double dt,
             double* drift = nullptr);

// Euler step of zdot = (I - z z^T) u_z, then renormalization.
Vec ZStep(const Vec& z, const Vec& u_z, double dt);

// Tangential part of r at z, scaled down to norm `rate_limit` if longer.
Vec ClampZRate(const Vec& z, const Vec& r, double rate_limit);

// Euler step of zdot = (I - z z^T) r, rdot = u_r. The new r is then passed
// through ClampZRate at the new z so z never rotates faster than the limit.
SecondOrderHyperplane ZrStep(const SecondOrderHyperplane& state,
                             const Vec& u_r, double dt,
                             double rate_limit = kDefaultZRateLimit);

// Bicycle model. Throws InvalidState when |steering| >= pi/2.
BodyVelocity VehicleBodyVelocity(const VehicleState& state,
                                 const VehicleParams& params);

// Rows (v_b0, v_b1, w), columns (u_a, u_w): derivative of the body velocity
// with respect to (speed, steering).
Eigen::Matrix<double, 3, 2> VehicleVelocityJacobian(
    const VehicleState& state, const VehicleParams& params);

VehicleState VehicleStep(const VehicleState& state,
                         const VehicleParams& params, double u_a, double u_w,
                         double dt, double* drift = nullptr);

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_DYNAMICS_H_
