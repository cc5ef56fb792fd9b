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

#include "ellipsoid_shield/distance_oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ellipsoid_shield/separation.h"

namespace eshield {

namespace {

constexpr int kRootMaxIters = 200;
constexpr double kRootTol = 1e-12;

// Offset from the center to the boundary point whose outward normal is n.
Vec SupportOffset(const Mat& q_sq, const Mat& q, const Vec& n) {
  return q_sq * n / (q * n).norm();
}

Mat SupportOffsetJacobian(const Mat& q_sq, const Mat& q, const Vec& n) {
  const double s = (q * n).norm();
  const Vec w = q_sq * n;
  return q_sq / s - w * w.transpose() / (s * s * s);
}

// Newton refinement of the pair of boundary points sharing a common normal:
// p_j - S_j(n) - (p_i + S_i(n)) = delta n, ‖n‖ = 1. Used only when the
// alternating projections stall (touching or nearly parallel boundaries).
bool PolishPair(const ShapedBody& body_i, const ShapedBody& body_j,
                const Vec& n0, Vec* x, Vec* y) {
  const int d = body_i.dim();
  const Mat qi = ShapedMatrix(body_i), qj = ShapedMatrix(body_j);
  const Mat qi_sq = ShapedMatrixSquared(body_i);
  const Mat qj_sq = ShapedMatrixSquared(body_j);
  const Vec dp = body_j.pose.p - body_i.pose.p;
  Eigen::VectorXd state(d + 1);
  state.head(d) = n0.normalized();
  state(d) = dp.dot(state.head(d)) - (SupportOffset(qi_sq, qi, n0) +
                                      SupportOffset(qj_sq, qj, n0))
                                         .dot(state.head(d));
  auto residual = [&](const Eigen::VectorXd& s) {
    const Vec n = s.head(d);
    Eigen::VectorXd r(d + 1);
    r.head(d) = dp - SupportOffset(qi_sq, qi, n) - SupportOffset(qj_sq, qj, n) -
                s(d) * n;
    r(d) = n.squaredNorm() - 1.0;
    return r;
  };
  const double scale = 1.0 + dp.norm();
  Eigen::VectorXd r = residual(state);
  for (int it = 0; it < 50 && r.norm() > 1e-15 * scale; ++it) {
    const Vec n = state.head(d);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(d + 1, d + 1);
    J.topLeftCorner(d, d) = -SupportOffsetJacobian(qi_sq, qi, n) -
                            SupportOffsetJacobian(qj_sq, qj, n) -
                            state(d) * Mat::Identity(d, d);
    J.block(0, d, d, 1) = -n;
    J.block(d, 0, 1, d) = 2.0 * n.transpose();
    const Eigen::VectorXd step = J.fullPivLu().solve(-r);
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Eigen::VectorXd trial = state + t * step;
      const Eigen::VectorXd r_trial = residual(trial);
      if (r_trial.norm() < r.norm()) {
        state = trial;
        r = r_trial;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
  }
  // A negative offset means the bodies interpenetrate along n.
  if (!state.allFinite() || state(d) < -1e-12) return false;
  const Vec n = state.head(d).normalized();
  *x = body_i.pose.p + SupportOffset(qi_sq, qi, n);
  *y = body_j.pose.p - SupportOffset(qj_sq, qj, n);
  return true;
}

}  // namespace

Vec ProjectOntoEllipsoid(const ShapedBody& body, const Vec& x) {
  const Vec y = body.pose.R.transpose() * (x - body.pose.p);
  const Vec& q = body.shape.axes;
  if (y.cwiseQuotient(q).squaredNorm() <= 1.0) return x;

  // Minimizer u_m = q_m^2 y_m / (q_m^2 + t) where t > 0 solves
  // F(t) = sum (q_m y_m / (q_m^2 + t))^2 - 1 = 0; F is convex and decreasing.
  const Vec q_sq = q.cwiseAbs2();
  const Vec qy = q.cwiseProduct(y);
  double lo = 0.0;
  double hi = qy.norm();
  double t = 0.0;
  bool done = false;
  for (int it = 0; it < kRootMaxIters; ++it) {
    double f = -1.0, df = 0.0;
    for (int m = 0; m < q.size(); ++m) {
      const double ratio = qy(m) / (q_sq(m) + t);
      f += ratio * ratio;
      df -= 2.0 * ratio * ratio / (q_sq(m) + t);
    }
    if (std::abs(f) <= kRootTol) {
      done = true;
      break;
    }
    if (f > 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      done = true;
      break;
    }
    double next = t - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  if (!done) throw NumericalFailure("ellipsoid projection did not converge");
  Vec u(q.size());
  for (int m = 0; m < q.size(); ++m) u(m) = q_sq(m) * y(m) / (q_sq(m) + t);
  return body.pose.p + body.pose.R * u;
}

OracleResult MinDistance(const ShapedBody& body_i, const ShapedBody& body_j,
                         const OracleOptions& options) {
  const int d = body_i.dim();
  const double spread = body_j.shape.axes.maxCoeff();
  std::vector<Vec> starts;
  starts.push_back(body_j.pose.p);
  const std::vector<Vec> dirs =
      SpreadDirections(d, std::max(0, options.num_starts - 1));
  for (const Vec& u : dirs) starts.push_back(body_j.pose.p + spread * u);

  OracleResult best;
  best.distance = std::numeric_limits<double>::infinity();
  for (const Vec& start : starts) {
    Vec y = ProjectOntoEllipsoid(body_j, start);
    Vec x = ProjectOntoEllipsoid(body_i, y);
    double gap = (x - y).norm();
    bool monotone = true;
    bool converged = false;
    int it = 0;
    for (; it < options.max_iters; ++it) {
      const Vec y_next = ProjectOntoEllipsoid(body_j, x);
      const Vec x_next = ProjectOntoEllipsoid(body_i, y_next);
      const double gap_next = (x_next - y_next).norm();
      if (gap_next > gap * (1.0 + 1e-12) + 1e-15) monotone = false;
      const double change =
          std::max((x_next - x).norm(), (y_next - y).norm());
      x = x_next;
      y = y_next;
      gap = gap_next;
      if (change <= options.step_tol || gap <= 0.1 * options.overlap_gap) {
        converged = true;
        ++it;
        break;
      }
    }
    if (!converged && gap > options.overlap_gap) {
      Vec xp, yp;
      if (PolishPair(body_i, body_j, y - x, &xp, &yp)) {
        const double polished = (xp - yp).norm();
        const bool on_boundaries = std::abs(EllipsoidValue(body_i, xp)) <= 1e-9 &&
                                   std::abs(EllipsoidValue(body_j, yp)) <= 1e-9;
        if (on_boundaries && polished < gap) {
          x = xp;
          y = yp;
          gap = polished;
          converged = true;
        }
      }
    }
    if (gap < best.distance) {
      best.distance = gap;
      best.x_star = x;
      best.y_star = y;
      best.iterations = it;
      best.converged = converged;
    }
    best.monotone = best.monotone && monotone;
  }
  best.overlap = best.distance <= options.overlap_gap;
  return best;
}

}  // namespace eshield
