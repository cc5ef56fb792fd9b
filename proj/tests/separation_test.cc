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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "ellipsoid_shield/distance_oracle.h"
#include "test_util.h"

namespace eshield {
namespace {

using testing::BoundaryPoint;
using testing::Circle;
using testing::MakeBody;
using testing::RandomBody;
using testing::RandomUnit;
using testing::V;

// Random pair whose centers are far enough apart to be disjoint.
void DisjointPair(std::mt19937_64& rng, int d, ShapedBody* bi,
                  ShapedBody* bj) {
  *bi = RandomBody(rng, d, 1);
  *bj = RandomBody(rng, d, 2);
  std::uniform_real_distribution<double> gap(0.2, 3.0);
  bj->pose.p = RandomUnit(rng, d) *
               (bi->shape.axes.maxCoeff() + bj->shape.axes.maxCoeff() +
                gap(rng));
}

// Pose after moving with body velocity (v, w) for time eps (exact for
// constant velocity at first order, which is all a derivative needs).
Pose Moved(const Pose& pose, const Vec& v, const Vec& w, double eps) {
  Pose out = pose;
  out.p = pose.p + eps * pose.R * v;
  out.R = pose.R * RotationExp(w, std::abs(eps));
  if (eps < 0) out.R = pose.R * RotationExp(-w, -eps);
  return out;
}

Vec MovedZ(const Vec& z, const Vec& u, double eps) {
  const Vec zn = z + eps * (u - z * z.dot(u));
  return zn / zn.norm();
}

TEST(TangentPoint, Examples) {
  EXPECT_EQ(TangentPoint(Circle(1, V({0, 0})), V({1, 0})), V({1, 0}));
  const ShapedBody b = MakeBody(1, V({1, 2}), Mat::Identity(2, 2), V({2, 1}));
  EXPECT_EQ(TangentPoint(b, V({0, 1})), V({1, 3}));
}

TEST(TangentPoint, LiesOnBoundary) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) {
    const int d = 2 + k % 2;
    const ShapedBody b = RandomBody(rng, d, 1, 4.0);
    ASSERT_NEAR(EllipsoidValue(b, TangentPoint(b, RandomUnit(rng, d))), 0.0,
                1e-10);
  }
}

TEST(HyperplaneOf, UnitCircle) {
  const Hyperplane l = HyperplaneOf(Circle(1, V({0, 0})), V({1, 0}));
  EXPECT_EQ(l.normal, V({1, 0}));
  EXPECT_DOUBLE_EQ(l.offset, 1.0);
}

TEST(HyperplaneOf, TranslationShiftsOffset) {
  std::mt19937_64 rng(2);
  ShapedBody b = RandomBody(rng, 3, 1);
  const Vec z = RandomUnit(rng, 3);
  const Hyperplane before = HyperplaneOf(b, z);
  const Vec t = V({0.5, -1.0, 2.0});
  b.pose.p += t;
  const Hyperplane after = HyperplaneOf(b, z);
  EXPECT_LE((after.normal - before.normal).norm(), 1e-15);
  EXPECT_NEAR(after.offset, before.offset + before.normal.dot(t), 1e-12);
}

TEST(HyperplaneOf, SupportsTheBody) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const int d = 2 + k % 2;
    const ShapedBody b = RandomBody(rng, d, 1, 3.0);
    const Vec z = RandomUnit(rng, d);
    const Hyperplane l = HyperplaneOf(b, z);
    ASSERT_NEAR(l.normal.dot(TangentPoint(b, z)) - l.offset, 0.0, 1e-10);
    for (int s = 0; s < 1000; ++s) {
      const Vec x = BoundaryPoint(b, RandomUnit(rng, d));
      ASSERT_LE(l.normal.dot(x) - l.offset, 1e-10);
    }
  }
}

TEST(NearestPoint, UnitCircles) {
  const ShapedBody bi = Circle(1, V({0, 0}));
  const ShapedBody bj = Circle(2, V({3, 0}));
  EXPECT_LE((NearestPoint(bi, bj, V({1, 0})) - V({2, 0})).norm(), 1e-15);
  EXPECT_LE((NearestPoint(bi, bj, V({0, 1})) - V({3, -1})).norm(), 1e-15);
}

TEST(NearestPoint, MinimizesOffsetOverSampledBoundary) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const int d = 2 + k % 2;
    ShapedBody bi, bj;
    DisjointPair(rng, d, &bi, &bj);
    const Vec z = RandomUnit(rng, d);
    const Vec n = NearestPoint(bi, bj, z);
    ASSERT_NEAR(EllipsoidValue(bj, n), 0.0, 1e-10);
    const Hyperplane l = HyperplaneOf(bi, z);
    for (int s = 0; s < 1000; ++s) {
      const Vec y = BoundaryPoint(bj, RandomUnit(rng, d));
      ASSERT_GE(l.normal.dot(y), l.normal.dot(n) - 1e-10);
    }
  }
}

TEST(SignedDistance, Examples) {
  const ShapedBody bi = Circle(1, V({0, 0}));
  const ShapedBody bj = Circle(2, V({3, 0}));
  EXPECT_NEAR(SignedDistance(bi, bj, V({1, 0})), 1.0, 1e-15);
  EXPECT_NEAR(SignedDistance(bi, bj, V({0, 1})), -2.0, 1e-15);
  const ShapedBody ei = MakeBody(1, V({0, 0}), Mat::Identity(2, 2), V({2, 1}));
  const ShapedBody ej =
      MakeBody(2, V({5, 0}), Mat::Identity(2, 2), V({1.5, 1}));
  EXPECT_NEAR(SignedDistance(ei, ej, V({1, 0})), 1.5, 1e-15);
}

TEST(SignedDistance, IsPlaneDistanceOfNearestPoint) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 1000; ++k) {
    const int d = 2 + k % 2;
    ShapedBody bi, bj;
    DisjointPair(rng, d, &bi, &bj);
    const Vec z = RandomUnit(rng, d);
    const Hyperplane l = HyperplaneOf(bi, z);
    const Vec n = NearestPoint(bi, bj, z);
    const double plane = (l.normal.dot(n) - l.offset) / l.normal.norm();
    ASSERT_NEAR(SignedDistance(bi, bj, z), plane, 1e-10);
  }
}

TEST(SignedDistance, RigidMotionEquivariance) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 500; ++k) {
    const int d = 2 + k % 2;
    ShapedBody bi, bj;
    DisjointPair(rng, d, &bi, &bj);
    const Vec z = RandomUnit(rng, d);
    const double h = SignedDistance(bi, bj, z);

    ShapedBody ti = bi, tj = bj;
    const Vec t = RandomUnit(rng, d) * 7.0;
    ti.pose.p += t;
    tj.pose.p += t;
    ASSERT_NEAR(SignedDistance(ti, tj, z), h, 1e-10);

    const Mat r0 = testing::GaussianRotation(rng, d);
    ShapedBody ri = bi, rj = bj;
    ri.pose.p = r0 * bi.pose.p;
    ri.pose.R = r0 * bi.pose.R;
    rj.pose.p = r0 * bj.pose.p;
    rj.pose.R = r0 * bj.pose.R;
    ASSERT_NEAR(SignedDistance(ri, rj, r0 * z), h, 1e-10);
  }
}

TEST(GradZ, VanishesAtMaximizerForUnitCircles) {
  const ShapedBody bi = Circle(1, V({0, 0}));
  const ShapedBody bj = Circle(2, V({3, 0}));
  const Vec z = V({1, 0});
  const Vec g = GradZ(bi, bj, z).transpose();
  EXPECT_LE((g - z * z.dot(g)).norm(), 1e-15);
}

TEST(GradZ, PointsTowardSeparatingDirection) {
  const ShapedBody bi = Circle(1, V({0, 0}));
  const ShapedBody bj = Circle(2, V({3, 0}));
  const Vec z = V({0, 1});
  const Vec g = GradZ(bi, bj, z).transpose();
  EXPECT_GT((g - z * z.dot(g))(0), 0.0);
}

TEST(GradZ, MatchesCentralDifferences) {
  std::mt19937_64 rng(7);
  const double eps = 1e-6;
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + k % 2;
    ShapedBody bi, bj;
    DisjointPair(rng, d, &bi, &bj);
    const Vec z = RandomUnit(rng, d);
    const RowVec g = GradZ(bi, bj, z);
    for (int m = 0; m < d; ++m) {
      Vec zp = z, zm = z;
      zp(m) += eps;
      zm(m) -= eps;
      const double fd =
          (SignedDistance(bi, bj, zp) - SignedDistance(bi, bj, zm)) /
          (2 * eps);
      ASSERT_LE(std::abs(g(m) - fd) / std::max(1.0, std::abs(fd)), 1e-5);
    }
  }
}

TEST(Coefficients, UnitCircleEta) {
  const ShapedBody bi = Circle(1, V({0, 0}));
  const ShapedBody bj = Circle(2, V({3, 0.5}));
  const Vec z = V({0.6, 0.8});
  const CbfCoefficients c = Coefficients(bi, bj, z);
  EXPECT_LE((c.eta.transpose() + z).norm(), 1e-15);
}

TEST(Coefficients, StructuralInvariants) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 1000; ++k) {
    const int d = 2 + k % 2;
    ShapedBody bi, bj;
    DisjointPair(rng, d, &bi, &bj);
    const CbfCoefficients c = Coefficients(bi, bj, RandomUnit(rng, d));
    ASSERT_NEAR(c.eta.norm(), 1.0, 1e-9);
    ASSERT_NEAR(c.xi.norm(), 1.0, 1e-9);
    ASSERT_EQ(c.xi, -c.eta);
    ASSERT_GT(c.sigma, 0.0);
    ASSERT_EQ(c.zeta.size(), AngularDim(d));
    ASSERT_EQ(c.nu.size(), AngularDim(d));
    ASSERT_EQ(c.mu.size(), d);
  }
}

// Each channel against a central difference of h along the matching flow.
TEST(Coefficients, MatchFiniteDifferencesPerChannel) {
  std::mt19937_64 rng(9);
  const double eps = 1e-6;
  auto rel = [](double a, double b) {
    return std::abs(a - b) / std::max(1.0, std::abs(b));
  };
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + k % 2;
    const int na = AngularDim(d);
    ShapedBody bi, bj;
    DisjointPair(rng, d, &bi, &bj);
    const Vec z = RandomUnit(rng, d);
    const CbfCoefficients c = Coefficients(bi, bj, z);
    const Vec v = RandomUnit(rng, d);
    const Vec w = RandomUnit(rng, na);
    const Vec zero_v = Vec::Zero(d), zero_w = Vec::Zero(na);

    auto h_i = [&](const Vec& vv, const Vec& ww, double e) {
      ShapedBody b = bi;
      b.pose = Moved(bi.pose, vv, ww, e);
      return SignedDistance(b, bj, z);
    };
    auto h_j = [&](const Vec& vv, const Vec& ww, double e) {
      ShapedBody b = bj;
      b.pose = Moved(bj.pose, vv, ww, e);
      return SignedDistance(bi, b, z);
    };
    auto fd = [&](auto f, const Vec& vv, const Vec& ww) {
      return (f(vv, ww, eps) - f(vv, ww, -eps)) / (2 * eps);
    };

    ASSERT_LE(rel((c.eta * bi.pose.R * v)(0), fd(h_i, v, zero_w)), 1e-5);
    ASSERT_LE(rel((OwnerAngularRow(c, bi) * w)(0), fd(h_i, zero_v, w)), 1e-5);
    ASSERT_LE(rel((c.xi * bj.pose.R * v)(0), fd(h_j, v, zero_w)), 1e-5);
    ASSERT_LE(rel((OtherAngularRow(c, bj) * w)(0), fd(h_j, zero_v, w)), 1e-5);

    const Vec u = RandomUnit(rng, d);
    const double fd_z = (SignedDistance(bi, bj, MovedZ(z, u, eps)) -
                         SignedDistance(bi, bj, MovedZ(z, u, -eps))) /
                        (2 * eps);
    const double mu_u = (c.mu * (u - z * z.dot(u)))(0);
    ASSERT_LE(rel(mu_u, fd_z), 1e-5);
  }
}

TEST(HDot, ZeroInputsGiveZero) {
  std::mt19937_64 rng(10);
  ShapedBody bi, bj;
  DisjointPair(rng, 3, &bi, &bj);
  EXPECT_EQ(HDot(bi, bj, RandomUnit(rng, 3), BodyVelocity::Zero(3),
                 BodyVelocity::Zero(3), Vec::Zero(3)),
            0.0);
}

TEST(HDot, JointTranslationGivesZero) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 2;
    ShapedBody bi, bj;
    DisjointPair(rng, d, &bi, &bj);
    const Vec world = RandomUnit(rng, d) * 3.0;
    BodyVelocity ui = BodyVelocity::Zero(d), uj = BodyVelocity::Zero(d);
    ui.v = bi.pose.R.transpose() * world;
    uj.v = bj.pose.R.transpose() * world;
    ASSERT_NEAR(HDot(bi, bj, RandomUnit(rng, d), ui, uj, Vec::Zero(d)), 0.0,
                1e-12);
  }
}

TEST(HDot, MatchesSimultaneousFlow) {
  std::mt19937_64 rng(12);
  const double eps = 1e-6;
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + k % 2;
    const int na = AngularDim(d);
    ShapedBody bi, bj;
    DisjointPair(rng, d, &bi, &bj);
    const Vec z = RandomUnit(rng, d);
    BodyVelocity ui{RandomUnit(rng, d), RandomUnit(rng, na)};
    BodyVelocity uj{RandomUnit(rng, d), RandomUnit(rng, na)};
    const Vec uz = RandomUnit(rng, d) * 2.0;
    auto h_at = [&](double e) {
      ShapedBody a = bi, b = bj;
      a.pose = Moved(bi.pose, ui.v, ui.omega, e);
      b.pose = Moved(bj.pose, uj.v, uj.omega, e);
      return SignedDistance(a, b, MovedZ(z, uz, e));
    };
    const double fd = (h_at(eps) - h_at(-eps)) / (2 * eps);
    const double an = HDot(bi, bj, z, ui, uj, uz);
    ASSERT_LE(std::abs(an - fd) / std::max(1.0, std::abs(fd)), 1e-5);
    const CbfCoefficients c = Coefficients(bi, bj, z);
    ASSERT_NEAR(HDot(c, bi, bj, z, ui, uj, uz), an, 1e-12);
  }
}

TEST(MaximizeH, UnitCircles) {
  const MaximizeResult r =
      MaximizeH(Circle(1, V({0, 0})), Circle(2, V({3, 0})), V({0.6, 0.8}));
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.h, 1.0, 1e-12);
  EXPECT_LE((r.z - V({1, 0})).norm(), 1e-6);
}

TEST(MaximizeH, CollinearEllipses) {
  const ShapedBody ei = MakeBody(1, V({0, 0}), Mat::Identity(2, 2), V({2, 1}));
  const ShapedBody ej =
      MakeBody(2, V({5, 0}), Mat::Identity(2, 2), V({1.5, 1}));
  const MaximizeResult r = MaximizeH(ei, ej);
  EXPECT_NEAR(r.h, 1.5, 1e-10);
  EXPECT_FALSE(r.ill_conditioned);
}

TEST(MaximizeH, AscendsAndStopsAtStationaryPoint) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 200; ++k) {
    const int d = 2 + k % 2;
    ShapedBody bi, bj;
    DisjointPair(rng, d, &bi, &bj);
    const Vec z0 = InitialHyperplane(bi, bj);
    ASSERT_GT(SignedDistance(bi, bj, z0), 0.0);
    const MaximizeResult r = MaximizeH(bi, bj, z0);
    ASSERT_TRUE(r.converged);
    ASSERT_GE(r.h, SignedDistance(bi, bj, z0));
    ASSERT_LE(r.grad_norm, 1e-10 * std::max(1.0, std::abs(r.h)) + 1e-10);
    ASSERT_NEAR(r.z.norm(), 1.0, 1e-14);
  }
}

TEST(MaximizeH, FlagsIterationCap) {
  const ShapedBody ei = MakeBody(1, V({0, 0}), Mat::Identity(2, 2), V({2, 1}));
  const ShapedBody ej =
      MakeBody(2, V({5, 1}), PlanarRotation(0.7), V({1.5, 0.5}));
  const MaximizeResult r = MaximizeH(ei, ej, V({0, 1}), {1e-10, 1});
  EXPECT_FALSE(r.converged);
  EXPECT_GE(r.h, SignedDistance(ei, ej, V({0, 1})));
}

TEST(MaximizeH, FlagsThinShapes) {
  const ShapedBody ei =
      MakeBody(1, V({0, 0}), Mat::Identity(2, 2), V({2, 0.01}));
  const ShapedBody ej = Circle(2, V({0, 5}));
  EXPECT_TRUE(MaximizeH(ei, ej).ill_conditioned);
}

TEST(InitialHyperplane, FallsBackToSpreadDirections) {
  // Long thin body i: the scaled center direction does not separate.
  const ShapedBody ei =
      MakeBody(1, V({0, 0}), Mat::Identity(2, 2), V({5, 0.2}));
  const ShapedBody ej = Circle(2, V({6.5, 0.75}), 1.0);
  const Vec naive =
      (ShapedMatrixInverse(ei) * (ej.pose.p - ei.pose.p)).normalized();
  ASSERT_LE(SignedDistance(ei, ej, naive), 0.0);
  EXPECT_GT(SignedDistance(ei, ej, InitialHyperplane(ei, ej)), 0.0);
}

TEST(SpreadDirections, AreUnitAndDistinct) {
  for (int d : {2, 3}) {
    const int count = d == 2 ? 32 : 242;
    const std::vector<Vec> dirs = SpreadDirections(d, count);
    ASSERT_EQ(static_cast<int>(dirs.size()), count);
    double closest = 2.0;
    for (size_t a = 0; a < dirs.size(); ++a) {
      ASSERT_NEAR(dirs[a].norm(), 1.0, 1e-14);
      for (size_t b = a + 1; b < dirs.size(); ++b) {
        closest = std::min(closest, (dirs[a] - dirs[b]).norm());
      }
    }
    EXPECT_GT(closest, 0.05);
  }
}

TEST(Duality, HyperplaneDistanceNeverExceedsTrueDistance) {
  std::mt19937_64 rng(14);
  for (int k = 0; k < 100; ++k) {
    const int d = 2 + k % 2;
    ShapedBody bi, bj;
    DisjointPair(rng, d, &bi, &bj);
    const OracleResult w = MinDistance(bi, bj);
    ASSERT_FALSE(w.overlap);
    for (int s = 0; s < 20; ++s) {
      ASSERT_LE(SignedDistance(bi, bj, RandomUnit(rng, d)),
                w.distance + 1e-8);
    }
  }
}

TEST(Duality, MaximumEqualsTrueDistanceFromEitherOwner) {
  std::mt19937_64 rng(15);
  for (int k = 0; k < 60; ++k) {
    const int d = 2 + k % 2;
    ShapedBody bi, bj;
    DisjointPair(rng, d, &bi, &bj);
    const double w = MinDistance(bi, bj).distance;
    const double hij = MaximizeH(bi, bj).h;
    const double hji = MaximizeH(bj, bi).h;
    ASSERT_NEAR(hij, w, 1e-6 * std::max(1.0, w));
    ASSERT_NEAR(hji, hij, 1e-6);
  }
}

TEST(Hyperplane, RejectsNonUnitZ) {
  EXPECT_THROW(ValidateHyperplaneVar(V({1, 0.1}), 2), std::invalid_argument);
  EXPECT_THROW(ValidateHyperplaneVar(V({1, 0, 0}), 2), std::invalid_argument);
  EXPECT_NO_THROW(ValidateHyperplaneVar(V({0.6, 0.8}), 2));
}

}  // namespace
}  // namespace eshield
