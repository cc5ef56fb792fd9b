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

#include "ellipsoid_shield/dynamics.h"

#include <cmath>
#include <numbers>

namespace eshield {

namespace {

// Left Jacobian of the rotation exponential, mapping the body velocity to
// the displacement over one step.
Mat TranslationJacobian(const Vec& omega, double dt) {
  if (omega.size() == 1) {
    const double th = omega(0) * dt;
    double s, c;  // sin(th)/th and (1 - cos(th))/th
    if (std::abs(th) < 1e-6) {
      s = 1.0 - th * th / 6.0;
      c = th / 2.0 - th * th * th / 24.0;
    } else {
      s = std::sin(th) / th;
      c = (1.0 - std::cos(th)) / th;
    }
    Mat J(2, 2);
    J << s, -c, c, s;
    return J;
  }
  const Vec phi = omega * dt;
  const double th = phi.norm();
  const Mat K = Wedge(phi);
  double c1, c2;
  if (th < 1e-6) {
    c1 = 0.5 - th * th / 24.0;
    c2 = 1.0 / 6.0 - th * th / 120.0;
  } else {
    c1 = (1.0 - std::cos(th)) / (th * th);
    c2 = (th - std::sin(th)) / (th * th * th);
  }
  return Mat::Identity(3, 3) + c1 * K + c2 * K * K;
}

void CheckSteering(double steering) {
  if (!(std::abs(steering) < std::numbers::pi / 2)) {
    throw InvalidState("steering angle must satisfy |phi| < pi/2");
  }
}

}  // namespace

void ValidateVehicleParams(const VehicleParams& params) {
  if (!(params.wheelbase > 0.0)) {
    throw std::invalid_argument("wheelbase must be positive");
  }
  if (!(params.cm_ratio >= 0.0 && params.cm_ratio <= 1.0)) {
    throw std::invalid_argument("center-of-mass ratio must lie in [0, 1]");
  }
}

Pose RbmStep(const Pose& pose, const BodyVelocity& velocity, double dt,
             double* drift) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  Pose next;
  next.p = pose.p +
           pose.R * (TranslationJacobian(velocity.omega, dt) * velocity.v) * dt;
  const Mat rotated = pose.R * RotationExp(velocity.omega, dt);
  if (drift != nullptr) *drift = OrthonormalityError(rotated);
  next.R = Reorthonormalize(rotated);
  return next;
}

Vec ZStep(const Vec& z, const Vec& u_z, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Vec moved = z + dt * (u_z - z * z.dot(u_z));
  return moved / moved.norm();
}

Vec ClampZRate(const Vec& z, const Vec& r, double rate_limit) {
  Vec tangential = r - z * z.dot(r);
  const double speed = tangential.norm();
  if (speed > rate_limit) tangential *= rate_limit / speed;
  return tangential;
}

SecondOrderHyperplane ZrStep(const SecondOrderHyperplane& state,
                             const Vec& u_r, double dt, double rate_limit) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const Vec& z = state.z;
  const Vec moved = z + dt * (state.r - z * z.dot(state.r));
  SecondOrderHyperplane next;
  next.z = moved / moved.norm();
  next.r = ClampZRate(next.z, state.r + dt * u_r, rate_limit);
  return next;
}

BodyVelocity VehicleBodyVelocity(const VehicleState& state,
                                 const VehicleParams& params) {
  CheckSteering(state.steering);
  const double tau = std::tan(state.steering);
  const double st = params.cm_ratio * tau;
  const double s = std::sqrt(1.0 + st * st);
  BodyVelocity out = BodyVelocity::Zero(2);
  out.v << state.speed / s, state.speed * st / s;
  out.omega(0) = state.speed * tau / (params.wheelbase * s);
  return out;
}

Eigen::Matrix<double, 3, 2> VehicleVelocityJacobian(
    const VehicleState& state, const VehicleParams& params) {
  CheckSteering(state.steering);
  const double tau = std::tan(state.steering);
  const double sec_sq = 1.0 + tau * tau;
  const double cm = params.cm_ratio;
  const double s = std::sqrt(1.0 + cm * cm * tau * tau);
  const double s3 = s * s * s;
  const double v = state.speed;
  Eigen::Matrix<double, 3, 2> J;
  J(0, 0) = 1.0 / s;
  J(1, 0) = cm * tau / s;
  J(2, 0) = tau / (params.wheelbase * s);
  J(0, 1) = sec_sq * (-v * cm * cm * tau / s3);
  J(1, 1) = sec_sq * (v * cm / s3);
  J(2, 1) = sec_sq * (v / (params.wheelbase * s3));
  return J;
}

VehicleState VehicleStep(const VehicleState& state,
                         const VehicleParams& params, double u_a, double u_w,
                         double dt, double* drift) {
  VehicleState next;
  next.pose = RbmStep(state.pose, VehicleBodyVelocity(state, params), dt, drift);
  next.speed = state.speed + dt * u_a;
  next.steering = state.steering + dt * u_w;
  CheckSteering(next.steering);
  return next;
}

}  // namespace eshield
