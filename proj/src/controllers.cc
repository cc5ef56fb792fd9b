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

#include "ellipsoid_shield/controllers.h"

#include <stdexcept>

namespace eshield {

void ValidateControllerParams(const ControllerParams& params) {
  if (!(params.gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(params.k_z.k > 0.0)) throw std::invalid_argument("k_z must be > 0");
  if (!(params.beta_v > 0.0) || !(params.beta_omega > 0.0) ||
      !(params.beta_a > 0.0) || !(params.beta_steer > 0.0)) {
    throw std::invalid_argument("QP weights must be > 0");
  }
  if (params.k_v < 0.0 || params.k_omega < 0.0) {
    throw std::invalid_argument("pose gains must be >= 0");
  }
  if (!(params.z_rate_limit > 0.0)) {
    throw std::invalid_argument("hyperplane rate limit must be > 0");
  }
  if (params.split != 0.5) throw std::invalid_argument("split must be 0.5");
}

BodyVelocity NominalPoseInput(const ShapedBody& body, const Pose& goal,
                              double k_v, double k_omega) {
  const Mat& R = body.pose.R;
  BodyVelocity out;
  out.v = k_v * R.transpose() * (goal.p - body.pose.p);
  const Mat rel = R.transpose() * goal.R;
  out.omega = 0.5 * k_omega * Vee(rel - rel.transpose());
  return out;
}

Vec NominalZInput(const ShapedBody& body_i, const ShapedBody& body_j,
                  const Vec& z, const GainSchedule& k_z) {
  const double h = SignedDistance(body_i, body_j, z);
  return k_z.Value(h) * GradZ(body_i, body_j, z).transpose();
}

LinearConstraint OwnerConstraint(const CbfCoefficients& c,
                                 const ShapedBody& owner, const Vec& z,
                                 double h, double gamma, double share) {
  const int d = owner.dim();
  const int nw = AngularDim(d);
  LinearConstraint row;
  row.a.resize(2 * d + nw);
  row.a.segment(0, d) = c.eta * owner.pose.R;
  row.a.segment(d, nw) = OwnerAngularRow(c, owner);
  const Mat proj = Mat::Identity(d, d) - z * z.transpose();
  row.a.segment(d + nw, d) = c.mu * proj;
  row.b = -share * gamma * h;
  return row;
}

LinearConstraint OtherConstraint(const CbfCoefficients& c,
                                 const ShapedBody& other, double h,
                                 double gamma) {
  const int d = other.dim();
  const int nw = AngularDim(d);
  LinearConstraint row;
  row.a.resize(d + nw);
  row.a.segment(0, d) = c.xi * other.pose.R;
  row.a.segment(d, nw) = OtherAngularRow(c, other);
  row.b = -0.5 * gamma * h;
  return row;
}

BodyQp AssembleBodyQp(int index, const std::vector<ShapedBody>& bodies,
                      const std::vector<bool>& movable,
                      const std::vector<PairChannel>& channels,
                      const std::vector<PairData>& pair_data,
                      const BodyVelocity& nominal,
                      const ControllerParams& params) {
  const ShapedBody& self = bodies[index];
  const int d = self.dim();
  const int nw = AngularDim(d);
  BodyQp out;
  std::vector<int> other_channels;
  for (int c = 0; c < static_cast<int>(channels.size()); ++c) {
    if (channels[c].owner == index) out.owned_channels.push_back(c);
    if (channels[c].other == index) other_channels.push_back(c);
  }
  const int n = d + nw + d * static_cast<int>(out.owned_channels.size());
  const int m = static_cast<int>(out.owned_channels.size() +
                                 other_channels.size());

  QpProblem& qp = out.problem;
  qp.w = Eigen::VectorXd::Ones(n);
  qp.w.segment(0, d).setConstant(params.beta_v);
  qp.w.segment(d, nw).setConstant(params.beta_omega);
  qp.u_nom = Eigen::VectorXd::Zero(n);
  qp.u_nom.segment(0, d) = nominal.v;
  qp.u_nom.segment(d, nw) = nominal.omega;
  qp.a = Eigen::MatrixXd::Zero(m, n);
  qp.b = Eigen::VectorXd::Zero(m);

  int row = 0;
  for (size_t k = 0; k < out.owned_channels.size(); ++k) {
    const int c = out.owned_channels[k];
    const PairData& data = pair_data[c];
    const int block = d + nw + d * static_cast<int>(k);
    qp.u_nom.segment(block, d) = data.u_z_nominal;
    const double share = movable[channels[c].other] ? params.split : 1.0;
    const LinearConstraint lc = OwnerConstraint(
        data.coeffs, self, channels[c].z, data.h, params.gamma, share);
    qp.a.block(row, 0, 1, d + nw) = lc.a.head(d + nw);
    qp.a.block(row, block, 1, d) = lc.a.tail(d);
    qp.b(row) = lc.b;
    out.row_channels.push_back(c);
    ++row;
  }
  for (const int c : other_channels) {
    const PairData& data = pair_data[c];
    const LinearConstraint lc =
        OtherConstraint(data.coeffs, self, data.h, params.gamma);
    qp.a.block(row, 0, 1, d + nw) = lc.a;
    qp.b(row) = lc.b;
    out.row_channels.push_back(c);
    ++row;
  }
  return out;
}

BodyVelocity BodyInputFromSolution(const Eigen::VectorXd& u, int d) {
  const int nw = AngularDim(d);
  BodyVelocity out;
  out.v = u.segment(0, d);
  out.omega = u.segment(d, nw);
  return out;
}

Vec ChannelInputFromSolution(const Eigen::VectorXd& u, int d, int block) {
  return u.segment(d + AngularDim(d) + d * block, d);
}

}  // namespace eshield
