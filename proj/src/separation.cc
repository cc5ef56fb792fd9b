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

#include "ellipsoid_shield/separation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace eshield {

namespace {

constexpr double kIllConditionedRatio = 100.0;

// Shared intermediate quantities of one (i, j, z) evaluation.
struct Terms {
  Mat qi_inv;  // Qbar_i^-1
  Mat qj_sq;   // Qbar_j^2
  Vec a;       // Qbar_i^-1 z, the hyperplane normal
  Vec dp;      // p_j - p_i
  double na = 0.0;
  double nb = 0.0;  // ‖Qbar_j a‖
};

Terms ComputeTerms(const ShapedBody& body_i, const ShapedBody& body_j,
                   const Vec& z) {
  Terms t;
  t.qi_inv = ShapedMatrixInverse(body_i);
  t.qj_sq = ShapedMatrixSquared(body_j);
  t.a = t.qi_inv * z;
  t.dp = body_j.pose.p - body_i.pose.p;
  t.na = t.a.norm();
  t.nb = std::sqrt(std::max(0.0, t.a.dot(t.qj_sq * t.a)));
  if (!(t.na > 0.0) || !(t.nb > 0.0)) {
    throw std::logic_error("degenerate hyperplane normal");
  }
  return t;
}

double HFromTerms(const Terms& t) {
  return (-t.nb + t.dp.dot(t.a) - 1.0) / t.na;
}

// Row G with dh = G da for variations of the normal a.
RowVec NormalGradient(const Terms& t) {
  const double rho = 1.0 - t.dp.dot(t.a) + t.nb;
  const double sigma = t.nb * t.na;
  RowVec g = rho / (t.na * t.na * t.na) * t.a.transpose() -
             (t.qj_sq * t.a).transpose() / sigma +
             t.dp.transpose() / t.na;
  return g;
}

Vec Normalized(const Vec& v) { return v / v.norm(); }

Vec ProjectTangent(const Vec& z, const Vec& g) { return g - z * z.dot(g); }

}  // namespace

void ValidateHyperplaneVar(const Vec& z, int d) {
  if (z.size() != d) throw std::invalid_argument("hyperplane size mismatch");
  if (!z.allFinite() || std::abs(z.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("hyperplane variable is not a unit vector");
  }
}

Vec TangentPoint(const ShapedBody& body_i, const Vec& z) {
  return ShapedMatrix(body_i) * z + body_i.pose.p;
}

Hyperplane HyperplaneOf(const ShapedBody& body_i, const Vec& z) {
  Hyperplane plane;
  plane.normal = ShapedMatrixInverse(body_i) * z;
  plane.offset = 1.0 + plane.normal.dot(body_i.pose.p);
  return plane;
}

Vec NearestPoint(const ShapedBody& body_i, const ShapedBody& body_j,
                 const Vec& z) {
  const Terms t = ComputeTerms(body_i, body_j, z);
  return body_j.pose.p - t.qj_sq * t.a / t.nb;
}

double SignedDistance(const ShapedBody& body_i, const ShapedBody& body_j,
                      const Vec& z) {
  return HFromTerms(ComputeTerms(body_i, body_j, z));
}

RowVec GradZ(const ShapedBody& body_i, const ShapedBody& body_j,
             const Vec& z) {
  const Terms t = ComputeTerms(body_i, body_j, z);
  return NormalGradient(t) * t.qi_inv;
}

CbfCoefficients Coefficients(const ShapedBody& body_i,
                             const ShapedBody& body_j, const Vec& z) {
  const int d = body_i.dim();
  const Terms t = ComputeTerms(body_i, body_j, z);
  CbfCoefficients c;
  c.rho = 1.0 - t.dp.dot(t.a) + t.nb;
  c.sigma = t.nb * t.na;
  c.eta = -t.a.transpose() / t.na;
  c.xi = t.a.transpose() / t.na;
  const RowVec g = NormalGradient(t);
  c.mu = g * t.qi_inv;
  const RowVec aq = (t.qj_sq * t.a).transpose();
  if (d == 3) {
    // A world-frame rotation rate W of body i moves the normal by
    // (Qbar_i^-1 wedge(z) - wedge(a)) W.
    c.zeta = g * (t.qi_inv * Wedge(z) - Wedge(t.a));
    c.nu = -aq * Wedge(t.a) / c.sigma;
  } else {
    const Mat J = Wedge(Vec::Ones(1));
    c.zeta = RowVec::Constant(1, g.dot(J * t.a - t.qi_inv * J * z));
    c.nu = RowVec::Constant(1, aq.dot(J * t.a) / c.sigma);
  }
  return c;
}

RowVec OwnerAngularRow(const CbfCoefficients& c, const ShapedBody& body_i) {
  if (body_i.dim() == 3) return c.zeta * body_i.pose.R;
  return c.zeta;
}

RowVec OtherAngularRow(const CbfCoefficients& c, const ShapedBody& body_j) {
  if (body_j.dim() == 3) return c.nu * body_j.pose.R;
  return c.nu;
}

double HDot(const CbfCoefficients& c, const ShapedBody& body_i,
            const ShapedBody& body_j, const Vec& z, const BodyVelocity& u_i,
            const BodyVelocity& u_j, const Vec& u_z) {
  return OwnerAngularRow(c, body_i).dot(u_i.omega) +
         c.eta.dot(body_i.pose.R * u_i.v) + c.mu.dot(ProjectTangent(z, u_z)) +
         OtherAngularRow(c, body_j).dot(u_j.omega) +
         c.xi.dot(body_j.pose.R * u_j.v);
}

double HDot(const ShapedBody& body_i, const ShapedBody& body_j, const Vec& z,
            const BodyVelocity& u_i, const BodyVelocity& u_j, const Vec& u_z) {
  return HDot(Coefficients(body_i, body_j, z), body_i, body_j, z, u_i, u_j,
              u_z);
}

std::vector<Vec> SpreadDirections(int d, int count) {
  CheckDimension(d);
  std::vector<Vec> dirs;
  dirs.reserve(count);
  if (d == 2) {
    for (int k = 0; k < count; ++k) {
      const double angle = 2.0 * std::numbers::pi * k / count;
      Vec u(2);
      u << std::cos(angle), std::sin(angle);
      dirs.push_back(u);
    }
    return dirs;
  }
  // Fibonacci lattice on the sphere.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double y = 1.0 - 2.0 * (k + 0.5) / count;
    const double r = std::sqrt(std::max(0.0, 1.0 - y * y));
    Vec u(3);
    u << r * std::cos(golden * k), y, r * std::sin(golden * k);
    dirs.push_back(u);
  }
  return dirs;
}

Vec InitialHyperplane(const ShapedBody& body_i, const ShapedBody& body_j) {
  const int d = body_i.dim();
  const Vec dp = body_j.pose.p - body_i.pose.p;
  Vec best = Vec::Unit(d, 0);
  double best_h = -std::numeric_limits<double>::infinity();
  const Vec guess = ShapedMatrixInverse(body_i) * dp;
  if (guess.norm() > 0.0) {
    best = Normalized(guess);
    best_h = SignedDistance(body_i, body_j, best);
    if (best_h > 0.0) return best;
  }
  for (const Vec& u : SpreadDirections(d, d == 2 ? 32 : 242)) {
    const double h = SignedDistance(body_i, body_j, u);
    if (h > best_h) {
      best_h = h;
      best = u;
    }
  }
  return best;
}

MaximizeResult MaximizeH(const ShapedBody& body_i, const ShapedBody& body_j,
                         const Vec& z0, const MaximizeOptions& options) {
  ValidateHyperplaneVar(z0, body_i.dim());
  MaximizeResult result;
  result.ill_conditioned = AxisRatio(body_i.shape) > kIllConditionedRatio ||
                           AxisRatio(body_j.shape) > kIllConditionedRatio;

  const Mat qi_inv = ShapedMatrixInverse(body_i);
  auto evaluate = [&](const Vec& z, double* h, Vec* grad) {
    const Terms t = ComputeTerms(body_i, body_j, z);
    *h = HFromTerms(t);
    *grad = ProjectTangent(z, (NormalGradient(t) * qi_inv).transpose());
  };

  Vec z = Normalized(z0);
  double h;
  Vec g;
  evaluate(z, &h, &g);
  double step = 1.0;
  Vec prev_z, prev_g;
  const double eps = std::numeric_limits<double>::epsilon();

  int it = 0;
  for (; it < options.max_iters; ++it) {
    const double gn = g.norm();
    if (gn <= options.tol) {
      result.converged = true;
      break;
    }
    if (it > 0) {
      // Barzilai-Borwein guess, safeguarded.
      const Vec s = z - prev_z;
      const Vec y = g - prev_g;
      const double sy = std::abs(s.dot(y));
      if (sy > 0.0) step = std::clamp(s.squaredNorm() / sy, 1e-10, 1e10);
    }
    bool accepted = false;
    Vec z_new, g_new;
    double h_new = h;
    for (int ls = 0; ls < 80; ++ls) {
      z_new = Normalized(z + step * g);
      evaluate(z_new, &h_new, &g_new);
      const bool armijo = h_new >= h + 1e-4 * step * gn * gn;
      // Near the optimum the increase drops below rounding of h; accept
      // steps that keep h within rounding and shrink the gradient.
      const bool flat = std::abs(h_new - h) <= 8.0 * eps * (1.0 + std::abs(h)) &&
                        g_new.norm() < gn;
      if (armijo || flat) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    prev_z = z;
    prev_g = g;
    z = z_new;
    g = g_new;
    h = h_new;
  }
  result.z = z;
  result.h = h;
  result.grad_norm = g.norm();
  result.iterations = it;
  if (result.grad_norm <= options.tol) result.converged = true;
  return result;
}

MaximizeResult MaximizeH(const ShapedBody& body_i, const ShapedBody& body_j,
                         const MaximizeOptions& options) {
  return MaximizeH(body_i, body_j, InitialHyperplane(body_i, body_j), options);
}

}  // namespace eshield
