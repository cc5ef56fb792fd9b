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

#include "ellipsoid_shield/geometry.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eshield {

namespace {
constexpr double kRotationTolerance = 1e-9;
constexpr double kSkewTolerance = 1e-9;
}  // namespace

void CheckDimension(int d) {
  if (d != 2 && d != 3) {
    throw std::invalid_argument("dimension must be 2 or 3, got " +
                                std::to_string(d));
  }
}

Pose Pose::Identity(int d) {
  CheckDimension(d);
  return Pose{Vec::Zero(d), Mat::Identity(d, d)};
}

BodyVelocity BodyVelocity::Zero(int d) {
  CheckDimension(d);
  return BodyVelocity{Vec::Zero(d), Vec::Zero(AngularDim(d))};
}

double OrthonormalityError(const Mat& R) {
  const int d = static_cast<int>(R.rows());
  return (R.transpose() * R - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
}

void ValidatePose(const Pose& pose) {
  const int d = pose.dim();
  CheckDimension(d);
  if (pose.R.rows() != d || pose.R.cols() != d) {
    throw std::invalid_argument("rotation size does not match position");
  }
  if (!pose.p.allFinite() || !pose.R.allFinite()) {
    throw std::invalid_argument("pose has non-finite entries");
  }
  if (OrthonormalityError(pose.R) > kRotationTolerance) {
    throw std::invalid_argument("rotation is not orthonormal");
  }
  if (std::abs(pose.R.determinant() - 1.0) > kRotationTolerance) {
    throw std::invalid_argument("rotation determinant is not +1");
  }
}

Mat Reorthonormalize(const Mat& R) {
  Eigen::JacobiSVD<Mat> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat U = svd.matrixU();
  const Mat V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0.0) {
    U.col(U.cols() - 1) *= -1.0;
  }
  return U * V.transpose();
}

void ValidateShape(const EllipsoidShape& shape) {
  CheckDimension(static_cast<int>(shape.axes.size()));
  for (int m = 0; m < shape.axes.size(); ++m) {
    if (!(shape.axes(m) > 0.0) || !std::isfinite(shape.axes(m))) {
      throw std::invalid_argument("semi-axis lengths must be positive");
    }
  }
}

void ValidateBody(const ShapedBody& body) {
  ValidatePose(body.pose);
  ValidateShape(body.shape);
  if (body.shape.axes.size() != body.dim()) {
    throw std::invalid_argument("shape dimension does not match pose");
  }
}

Mat Wedge(const Vec& a) {
  if (a.size() == 1) {
    Mat S(2, 2);
    S << 0.0, -a(0), a(0), 0.0;
    return S;
  }
  if (a.size() == 3) {
    Mat S(3, 3);
    S << 0.0, -a(2), a(1),
         a(2), 0.0, -a(0),
         -a(1), a(0), 0.0;
    return S;
  }
  throw std::invalid_argument("wedge takes 1 or 3 components");
}

Vec Vee(const Mat& S) {
  const int d = static_cast<int>(S.rows());
  CheckDimension(d);
  if (S.cols() != d) throw std::invalid_argument("vee needs a square matrix");
  if ((S + S.transpose()).cwiseAbs().maxCoeff() > kSkewTolerance) {
    throw std::invalid_argument("vee needs a skew-symmetric matrix");
  }
  if (d == 2) {
    Vec a(1);
    a << S(1, 0);
    return a;
  }
  Vec a(3);
  a << S(2, 1), S(0, 2), S(1, 0);
  return a;
}

Mat PlanarRotation(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat R(2, 2);
  R << c, -s, s, c;
  return R;
}

Mat RotationExp(const Vec& omega, double dt) {
  if (dt < 0.0) throw std::invalid_argument("dt must be non-negative");
  if (omega.size() == 1) return PlanarRotation(omega(0) * dt);
  if (omega.size() != 3) {
    throw std::invalid_argument("angular velocity takes 1 or 3 components");
  }
  const Vec phi = omega * dt;
  const double theta = phi.norm();
  const Mat K = Wedge(phi);
  Mat R = Mat::Identity(3, 3);
  if (theta < 1e-8) {
    // Taylor terms up to the order that stays below rounding.
    return R + K + 0.5 * K * K;
  }
  R += std::sin(theta) / theta * K +
       (1.0 - std::cos(theta)) / (theta * theta) * K * K;
  return R;
}

Mat ShapedMatrix(const ShapedBody& body) {
  const Mat& R = body.pose.R;
  Mat M = R * body.shape.axes.asDiagonal() * R.transpose();
  return 0.5 * (M + M.transpose());
}

Mat ShapedMatrixInverse(const ShapedBody& body) {
  const Mat& R = body.pose.R;
  Mat M = R * body.shape.axes.cwiseInverse().asDiagonal() * R.transpose();
  return 0.5 * (M + M.transpose());
}

Mat ShapedMatrixSquared(const ShapedBody& body) {
  const Mat& R = body.pose.R;
  Mat M = R * body.shape.axes.cwiseAbs2().asDiagonal() * R.transpose();
  return 0.5 * (M + M.transpose());
}

double EllipsoidValue(const ShapedBody& body, const Vec& x) {
  // Evaluate in the body frame so the diagonal inverse is exact.
  const Vec y = body.pose.R.transpose() * (x - body.pose.p);
  return y.cwiseQuotient(body.shape.axes).squaredNorm() - 1.0;
}

double AxisRatio(const EllipsoidShape& shape) {
  return shape.axes.maxCoeff() / shape.axes.minCoeff();
}

}  // namespace eshield
