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

#include "ellipsoid_shield/vehicle_barrier.h"

#include <cmath>

#include <unsupported/Eigen/AutoDiff>

namespace eshield {

namespace {

template <typename T>
using Vec2 = Eigen::Matrix<T, 2, 1>;
template <typename T>
using Mat2 = Eigen::Matrix<T, 2, 2>;

template <typename T>
struct PlanarBody {
  Vec2<T> p;
  Mat2<T> R;
  Vec2<T> v;  // body-frame velocity
  T w;
};

template <typename T>
struct PairRates {
  T hdot;
  Eigen::Matrix<T, 1, 2> mu;
};

// The 2D hdot expression, generic in the scalar type.
template <typename T>
PairRates<T> ComputeRates(const PlanarBody<T>& bi, const PlanarBody<T>& bj,
                          const Vec2<T>& z, const Vec2<T>& r,
                          const Eigen::Vector2d& qi,
                          const Eigen::Vector2d& qj) {
  using std::sqrt;
  Mat2<T> J;
  J << T(0.0), T(-1.0), T(1.0), T(0.0);
  Mat2<T> di = Mat2<T>::Zero(), dj = Mat2<T>::Zero();
  di(0, 0) = T(1.0 / qi(0));
  di(1, 1) = T(1.0 / qi(1));
  dj(0, 0) = T(qj(0) * qj(0));
  dj(1, 1) = T(qj(1) * qj(1));
  const Mat2<T> qi_inv = bi.R * di * bi.R.transpose();
  const Mat2<T> qj_sq = bj.R * dj * bj.R.transpose();
  const Vec2<T> a = qi_inv * z;
  const T na = sqrt(a.dot(a));
  const Vec2<T> qa = qj_sq * a;
  const T nb = sqrt(a.dot(qa));
  const Vec2<T> dp = bj.p - bi.p;
  const T rho = T(1.0) - dp.dot(a) + nb;
  const T sigma = nb * na;
  const Eigen::Matrix<T, 1, 2> g = (rho / (na * na * na)) * a.transpose() -
                                   qa.transpose() / sigma +
                                   dp.transpose() / na;
  PairRates<T> out;
  out.mu = g * qi_inv;
  const T zeta = g.dot(J * a - qi_inv * J * z);
  const T nu = qa.dot(J * a) / sigma;
  const Vec2<T> pr = r - z * z.dot(r);
  out.hdot = zeta * bi.w - a.dot(bi.R * bi.v) / na + out.mu.dot(pr) +
             nu * bj.w + a.dot(bj.R * bj.v) / na;
  return out;
}

PlanarBody<double> ToPlanar(const VehicleState& state,
                            const VehicleParams& params) {
  const BodyVelocity vel = VehicleBodyVelocity(state, params);
  PlanarBody<double> b;
  b.p = state.pose.p;
  b.R = state.pose.R;
  b.v = vel.v;
  b.w = vel.omega(0);
  return b;
}

using Ad = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;

Ad Seed(double value, double rate) {
  return Ad(value, Eigen::Matrix<double, 1, 1>::Constant(rate));
}

// Lifts a body to a curve through its state along the input-free motion:
// pdot = R v, Rdot = R w J, velocities constant.
PlanarBody<Ad> Lift(const PlanarBody<double>& b) {
  Mat2<double> J;
  J << 0.0, -1.0, 1.0, 0.0;
  const Vec2<double> p_rate = b.R * b.v;
  const Mat2<double> r_rate = b.R * J * b.w;
  PlanarBody<Ad> out;
  for (int i = 0; i < 2; ++i) {
    out.p(i) = Seed(b.p(i), p_rate(i));
    out.v(i) = Seed(b.v(i), 0.0);
    for (int k = 0; k < 2; ++k) out.R(i, k) = Seed(b.R(i, k), r_rate(i, k));
  }
  out.w = Seed(b.w, 0.0);
  return out;
}

ShapedBody AsShaped(const EllipsoidShape& shape, const VehicleState& state) {
  ShapedBody body;
  body.pose = state.pose;
  body.shape = shape;
  return body;
}

}  // namespace

double LateralError(const Pose& pose, const LinePath& path) {
  const Vec offset = pose.p - path.point;
  return path.direction(0) * offset(1) - path.direction(1) * offset(0);
}

double HeadingError(const Pose& pose, const LinePath& path) {
  const double line_angle = std::atan2(path.direction(1), path.direction(0));
  const Mat rel = PlanarRotation(line_angle).transpose() * pose.R;
  return 0.5 * (rel(1, 0) - rel(0, 1));
}

VehicleInput VehicleNominal(const VehicleState& state, const LinePath& path,
                            double cruise_speed) {
  VehicleInput in;
  in.u_a = -(state.speed - cruise_speed);
  in.u_w = -0.1 * LateralError(state.pose, path) -
           HeadingError(state.pose, path) - 1.5 * state.steering;
  return in;
}

double VehicleHDot(const EllipsoidShape& shape_i, const VehicleState& state_i,
                   const EllipsoidShape& shape_j, const VehicleState& state_j,
                   const SecondOrderHyperplane& zr,
                   const VehicleParams& params) {
  return ComputeRates<double>(ToPlanar(state_i, params),
                              ToPlanar(state_j, params), zr.z, zr.r,
                              shape_i.axes, shape_j.axes)
      .hdot;
}

VehiclePairTerms AnalyzeVehiclePair(const EllipsoidShape& shape_i,
                                    const VehicleState& state_i,
                                    const EllipsoidShape& shape_j,
                                    const VehicleState& state_j,
                                    const SecondOrderHyperplane& zr,
                                    const VehicleParams& params) {
  const ShapedBody body_i = AsShaped(shape_i, state_i);
  const ShapedBody body_j = AsShaped(shape_j, state_j);
  VehiclePairTerms t;
  t.coeffs = Coefficients(body_i, body_j, zr.z);
  t.h = SignedDistance(body_i, body_j, zr.z);

  const PlanarBody<double> bi = ToPlanar(state_i, params);
  const PlanarBody<double> bj = ToPlanar(state_j, params);
  const Vec2<double> pz = zr.r - zr.z * zr.z.dot(zr.r);
  Vec2<Ad> z_ad, r_ad;
  for (int i = 0; i < 2; ++i) {
    z_ad(i) = Seed(zr.z(i), pz(i));
    r_ad(i) = Seed(zr.r(i), 0.0);
  }
  const PairRates<Ad> rates = ComputeRates<Ad>(Lift(bi), Lift(bj), z_ad, r_ad,
                                               shape_i.axes, shape_j.axes);
  t.hdot = rates.hdot.value();
  t.drift = rates.hdot.derivatives()(0);
  t.mu_rate = Vec(2);
  for (int i = 0; i < 2; ++i) t.mu_rate(i) = rates.mu(i).derivatives()(0);

  const Eigen::Matrix<double, 3, 2> ji = VehicleVelocityJacobian(state_i, params);
  const Eigen::Matrix<double, 3, 2> jj = VehicleVelocityJacobian(state_j, params);
  t.owner_input = t.coeffs.zeta(0) * ji.row(2) +
                  (t.coeffs.eta * state_i.pose.R) * ji.topRows(2);
  t.other_input = t.coeffs.nu(0) * jj.row(2) +
                  (t.coeffs.xi * state_j.pose.R) * jj.topRows(2);
  t.mu_proj = t.coeffs.mu * (Mat::Identity(2, 2) - zr.z * zr.z.transpose());
  return t;
}

Vec NominalHyperplaneInput(const VehiclePairTerms& terms,
                           const SecondOrderHyperplane& zr, double k_z,
                           double rate_limit) {
  const Vec& z = zr.z;
  const Vec zdot = zr.r - z * z.dot(zr.r);
  const Vec mu = terms.coeffs.mu.transpose();
  const Mat proj = Mat::Identity(2, 2) - z * z.transpose();
  const Vec target = k_z * proj * mu;
  const Vec target_rate =
      k_z * (proj * terms.mu_rate -
             (zdot * z.transpose() + z * zdot.transpose()) * mu);
  const double norm = target.norm();
  if (norm <= rate_limit) return target_rate;
  const Vec dir = target / norm;
  return (rate_limit / norm) * (target_rate - dir * dir.dot(target_rate));
}

LinearConstraint VehicleOwnerConstraint(const VehiclePairTerms& terms,
                                        double share) {
  LinearConstraint row;
  row.a.resize(4);
  row.a.head(2) = terms.owner_input;
  row.a.tail(2) = terms.mu_proj;
  row.b = -share * (terms.drift + 2.0 * terms.hdot + terms.h);
  return row;
}

LinearConstraint VehicleOtherConstraint(const VehiclePairTerms& terms) {
  LinearConstraint row;
  row.a = terms.other_input;
  row.b = -0.5 * (terms.drift + 2.0 * terms.hdot + terms.h);
  return row;
}

}  // namespace eshield
