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

#ifndef ELLIPSOID_SHIELD_SEPARATION_H_
#define ELLIPSOID_SHIELD_SEPARATION_H_

#include <vector>

#include "ellipsoid_shield/geometry.h"

namespace eshield {

// A supporting hyperplane of body i is parameterized by a unit vector z: it
// touches the ellipsoid at Qbar_i z + p_i and has normal Qbar_i^-1 z. The
// signed distance h is measured from that hyperplane to the nearest point of
// body j, positive when the hyperplane separates the two bodies.

// {x : normal^T x = offset}, body i on the side normal^T x <= offset.
struct Hyperplane {
  Vec normal;
  double offset = 0.0;
};

// Rates of change of h with respect to each input channel.
//
// For d = 3 the angular rows multiply world-frame angular velocities, i.e.
//   hdot = zeta R_i w_i + eta R_i v_i + mu (I - z z^T) u_z
//        + nu R_j w_j + xi R_j v_j.
// For d = 2 zeta and nu are 1-wide and multiply w_i, w_j directly.
struct CbfCoefficients {
  RowVec zeta;
  RowVec eta;
  RowVec mu;
  RowVec nu;
  RowVec xi;
  double rho = 0.0;
  double sigma = 0.0;
};

// Throws std::invalid_argument unless |‖z‖ - 1| <= 1e-9 and sizes match.
void ValidateHyperplaneVar(const Vec& z, int d);

Vec TangentPoint(const ShapedBody& body_i, const Vec& z);

Hyperplane HyperplaneOf(const ShapedBody& body_i, const Vec& z);

// Point of body j with the most negative offset from the hyperplane.
Vec NearestPoint(const ShapedBody& body_i, const ShapedBody& body_j,
                 const Vec& z);

double SignedDistance(const ShapedBody& body_i, const ShapedBody& body_j,
                      const Vec& z);

// dh/dz without the tangent projection (equals the mu coefficient).
RowVec GradZ(const ShapedBody& body_i, const ShapedBody& body_j, const Vec& z);

CbfCoefficients Coefficients(const ShapedBody& body_i,
                             const ShapedBody& body_j, const Vec& z);

double HDot(const ShapedBody& body_i, const ShapedBody& body_j, const Vec& z,
            const BodyVelocity& u_i, const BodyVelocity& u_j, const Vec& u_z);

// Same as HDot with precomputed coefficients.
double HDot(const CbfCoefficients& c, const ShapedBody& body_i,
            const ShapedBody& body_j, const Vec& z, const BodyVelocity& u_i,
            const BodyVelocity& u_j, const Vec& u_z);

// Row multiplying the body-frame angular velocity of body i (resp. j).
RowVec OwnerAngularRow(const CbfCoefficients& c, const ShapedBody& body_i);
RowVec OtherAngularRow(const CbfCoefficients& c, const ShapedBody& body_j);

struct MaximizeOptions {
  double tol = 1e-10;
  int max_iters = 10000;
};

struct MaximizeResult {
  Vec z;
  double h = 0.0;
  double grad_norm = 0.0;  // norm of the tangent-projected gradient at z
  int iterations = 0;
  bool converged = false;
  bool ill_conditioned = false;  // some axis ratio exceeds 100
};

// Starting hyperplane: normalize(Qbar_i^-1 (p_j - p_i)); when that does not
// separate, the best of 32 (d = 2) or 242 (d = 3) spread directions.
Vec InitialHyperplane(const ShapedBody& body_i, const ShapedBody& body_j);

// Projected gradient ascent of h over the unit sphere from z0 with
// backtracking line search. Returns the best iterate; `converged` is false
// when max_iters is hit first.
MaximizeResult MaximizeH(const ShapedBody& body_i, const ShapedBody& body_j,
                         const Vec& z0, const MaximizeOptions& options = {});

// MaximizeH started from InitialHyperplane.
MaximizeResult MaximizeH(const ShapedBody& body_i, const ShapedBody& body_j,
                         const MaximizeOptions& options = {});

// Unit directions spread over the circle (d = 2) or sphere (d = 3).
std::vector<Vec> SpreadDirections(int d, int count);

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_SEPARATION_H_
