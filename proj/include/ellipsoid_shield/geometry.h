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

#ifndef ELLIPSOID_SHIELD_GEOMETRY_H_
#define ELLIPSOID_SHIELD_GEOMETRY_H_

#include <Eigen/Dense>

namespace eshield {

// Vectors and matrices of the ambient dimension d in {2, 3}. The dimension is
// a runtime value; storage is inline (max 3) so nothing here allocates.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using RowVec = Eigen::Matrix<double, 1, Eigen::Dynamic, Eigen::RowMajor, 1, 3>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

// Number of angular velocity components for dimension d: 1 or 3.
constexpr int AngularDim(int d) { return d * (d - 1) / 2; }

// Throws std::invalid_argument unless d is 2 or 3.
void CheckDimension(int d);

// Rigid pose g = (p, R) in SE(d).
struct Pose {
  Vec p;
  Mat R;

  int dim() const { return static_cast<int>(p.size()); }

  static Pose Identity(int d);
};

// Largest entry of |R^T R - I|.
double OrthonormalityError(const Mat& R);

// Throws std::invalid_argument when the rotation invariants are violated
// (orthonormality or det(R) = 1 beyond 1e-9) or the sizes disagree.
void ValidatePose(const Pose& pose);

// Nearest rotation in the Frobenius sense (polar factor), with det = +1.
Mat Reorthonormalize(const Mat& R);

// Translational and angular velocity, both in the body frame. `omega` has one
// entry for d = 2 and three for d = 3.
struct BodyVelocity {
  Vec v;
  Vec omega;

  int dim() const { return static_cast<int>(v.size()); }

  static BodyVelocity Zero(int d);
};

struct EllipsoidShape {
  Vec axes;  // semi-axis lengths, meters
};

void ValidateShape(const EllipsoidShape& shape);

struct ShapedBody {
  int id = 0;
  Pose pose;
  EllipsoidShape shape;

  int dim() const { return pose.dim(); }
};

void ValidateBody(const ShapedBody& body);

// Skew-symmetric matrix of a: [[0,-a],[a,0]] when a has one entry, the cross
// product matrix when a has three.
Mat Wedge(const Vec& a);

// Inverse of Wedge. Throws std::invalid_argument on a non-skew input.
Vec Vee(const Mat& S);

// exp(wedge(omega * dt)), closed form for both dimensions.
Mat RotationExp(const Vec& omega, double dt);

// Planar rotation by `angle` radians.
Mat PlanarRotation(double angle);

// R Q R^T with Q = diag(axes).
Mat ShapedMatrix(const ShapedBody& body);
// R Q^-1 R^T.
Mat ShapedMatrixInverse(const ShapedBody& body);
// R Q^2 R^T.
Mat ShapedMatrixSquared(const ShapedBody& body);

// (x - p)^T Qbar^-2 (x - p) - 1; non-positive exactly on the closed ellipsoid.
double EllipsoidValue(const ShapedBody& body, const Vec& x);

// Ratio of the longest to the shortest semi-axis.
double AxisRatio(const EllipsoidShape& shape);

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_GEOMETRY_H_
