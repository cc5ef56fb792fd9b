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

#include "ellipsoid_shield/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "ellipsoid_shield/distance_oracle.h"
#include "ellipsoid_shield/parallel.h"

namespace eshield {

namespace {

constexpr double kStrongDualityTol = 1e-6;
constexpr double kWeakDualityTol = 1e-8;
constexpr double kFdTol = 1e-5;
constexpr double kFdStep = 1e-6;
constexpr double kQpMatchTol = 1e-7;
constexpr double kKktTol = 1e-8;

Vec RandomUnit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> normal;
  Vec u(d);
  do {
    for (int i = 0; i < d; ++i) u(i) = normal(rng);
  } while (u.norm() < 1e-3);
  return u.normalized();
}

// Disjoint pair drawn by rejection against the oracle.
void RandomDisjointPair(std::mt19937_64& rng, int d, ShapedBody* bi,
                        ShapedBody* bj, double* w_star) {
  while (true) {
    RandomPair(rng, d, 5.0, bi, bj);
    const OracleResult o = MinDistance(*bi, *bj);
    if (!o.overlap && o.distance > 1e-3) {
      *w_star = o.distance;
      return;
    }
  }
}

SuiteResult Finish(const std::string& name, int cases,
                   const std::vector<double>& errors,
                   const std::vector<std::uint64_t>& seeds, double tolerance,
                   std::chrono::steady_clock::time_point start) {
  SuiteResult r;
  r.name = name;
  r.cases = cases;
  r.tolerance = tolerance;
  r.worst = errors.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < errors.size(); ++k) {
    // NaN counts as the worst possible outcome.
    if (std::isnan(errors[k]) || errors[k] > r.worst) {
      r.worst = std::isnan(errors[k]) ? std::numeric_limits<double>::infinity()
                                      : errors[k];
      r.worst_seed = seeds[k];
    }
  }
  r.pass = r.worst <= tolerance;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
  return r;
}

}  // namespace

Mat RandomRotation(std::mt19937_64& rng, int d) {
  CheckDimension(d);
  if (d == 2) {
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    return PlanarRotation(angle(rng));
  }
  std::normal_distribution<double> normal;
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  return Reorthonormalize(q.toRotationMatrix());
}

void RandomPair(std::mt19937_64& rng, int d, double max_ratio, ShapedBody* i,
                ShapedBody* j) {
  std::uniform_real_distribution<double> major(0.5, 2.0);
  std::uniform_real_distribution<double> ratio(1.0, max_ratio);
  auto shape = [&]() {
    EllipsoidShape s;
    s.axes = Vec(d);
    s.axes(0) = major(rng);
    for (int m = 1; m < d; ++m) s.axes(m) = s.axes(0) / ratio(rng);
    return s;
  };
  i->id = 1;
  j->id = 2;
  i->shape = shape();
  j->shape = shape();
  std::uniform_real_distribution<double> center(-3.0, 3.0);
  i->pose.p = Vec(d);
  for (int m = 0; m < d; ++m) i->pose.p(m) = center(rng);
  i->pose.R = RandomRotation(rng, d);
  const double reach = i->shape.axes.maxCoeff() + j->shape.axes.maxCoeff();
  std::uniform_real_distribution<double> dist(0.2 * reach, reach + 3.0);
  j->pose.p = i->pose.p + dist(rng) * RandomUnit(rng, d);
  j->pose.R = RandomRotation(rng, d);
}

QpProblem RandomQp(std::mt19937_64& rng, int num_vars, int num_constraints) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> log_w(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> margin(0.0, 1.0);
  QpProblem p;
  p.w.resize(num_vars);
  p.u_nom.resize(num_vars);
  Eigen::VectorXd feasible(num_vars);
  for (int i = 0; i < num_vars; ++i) {
    p.w(i) = std::exp(log_w(rng));
    p.u_nom(i) = 2.0 * normal(rng);
    feasible(i) = 2.0 * normal(rng);
  }
  p.a.resize(num_constraints, num_vars);
  p.b.resize(num_constraints);
  for (int k = 0; k < num_constraints; ++k) {
    do {
      for (int i = 0; i < num_vars; ++i) p.a(k, i) = normal(rng);
    } while (p.a.row(k).norm() < 1e-3);
    p.b(k) = p.a.row(k).dot(feasible) - margin(rng);
  }
  return p;
}

EnumerationResult SolveQpByEnumeration(const QpProblem& problem) {
  const int n = problem.num_vars();
  const int m = problem.num_constraints();
  EnumerationResult best;
  best.objective = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd w_inv = problem.w.cwiseInverse();
  for (int mask = 0; mask < (1 << m); ++mask) {
    std::vector<int> rows;
    for (int k = 0; k < m; ++k) {
      if (mask & (1 << k)) rows.push_back(k);
    }
    if (static_cast<int>(rows.size()) > n) continue;
    Eigen::VectorXd u = problem.u_nom;
    if (!rows.empty()) {
      Eigen::MatrixXd as(rows.size(), n);
      Eigen::VectorXd bs(rows.size());
      for (size_t r = 0; r < rows.size(); ++r) {
        as.row(r) = problem.a.row(rows[r]);
        bs(r) = problem.b(rows[r]);
      }
      const Eigen::MatrixXd gram = as * w_inv.asDiagonal() * as.transpose();
      Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
      if (lu.rank() < static_cast<int>(rows.size())) continue;
      const Eigen::VectorXd nu = lu.solve(bs - as * problem.u_nom);
      u = problem.u_nom + w_inv.asDiagonal() * as.transpose() * nu;
    }
    bool feasible = true;
    for (int k = 0; k < m; ++k) {
      const double scale = 1.0 + std::abs(problem.b(k));
      if (problem.a.row(k).dot(u) < problem.b(k) - 1e-9 * scale) {
        feasible = false;
        break;
      }
    }
    if (!feasible) continue;
    const Eigen::VectorXd diff = u - problem.u_nom;
    const double objective = diff.dot(problem.w.cwiseProduct(diff));
    if (objective < best.objective) {
      best.feasible = true;
      best.u = u;
      best.objective = objective;
    }
  }
  return best;
}

std::uint64_t CaseSeed(std::uint64_t seed, int suite, int index) {
  // splitmix64 of the combined key.
  std::uint64_t x = seed * 0x9E3779B97F4A7C15ull +
                    static_cast<std::uint64_t>(suite) * 0x100000001B3ull +
                    static_cast<std::uint64_t>(index);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double CoefficientFdError(const ShapedBody& body_i, const ShapedBody& body_j,
                          const Vec& z, std::mt19937_64& rng, double eps,
                          const std::function<void(CbfCoefficients&)>& hook) {
  const int d = body_i.dim();
  const int nw = AngularDim(d);
  CbfCoefficients c = Coefficients(body_i, body_j, z);
  if (hook) hook(c);
  double worst = 0.0;
  auto compare = [&](double analytic, double fd) {
    const double err = std::abs(analytic - fd) / std::max(1.0, std::abs(fd));
    worst = std::max(worst, std::isnan(err) ? HUGE_VAL : err);
  };
  auto moved = [&](const ShapedBody& b, const Vec& v, const Vec& w, double t) {
    ShapedBody out = b;
    out.pose.p = b.pose.p + t * b.pose.R * v;
    out.pose.R = b.pose.R * RotationExp(w, std::abs(t));
    if (t < 0.0) out.pose.R = b.pose.R * RotationExp(-w, -t);
    return out;
  };
  const Vec zero_v = Vec::Zero(d), zero_w = Vec::Zero(nw);
  // Owner translation and rotation.
  {
    const Vec v = RandomUnit(rng, d);
    const double fd = (SignedDistance(moved(body_i, v, zero_w, eps), body_j, z) -
                       SignedDistance(moved(body_i, v, zero_w, -eps), body_j, z)) /
                      (2.0 * eps);
    compare(c.eta.dot(body_i.pose.R * v), fd);
  }
  {
    const Vec w = RandomUnit(rng, nw);
    const double fd = (SignedDistance(moved(body_i, zero_v, w, eps), body_j, z) -
                       SignedDistance(moved(body_i, zero_v, w, -eps), body_j, z)) /
                      (2.0 * eps);
    compare(OwnerAngularRow(c, body_i).dot(w), fd);
  }
  // Other body.
  {
    const Vec v = RandomUnit(rng, d);
    const double fd = (SignedDistance(body_i, moved(body_j, v, zero_w, eps), z) -
                       SignedDistance(body_i, moved(body_j, v, zero_w, -eps), z)) /
                      (2.0 * eps);
    compare(c.xi.dot(body_j.pose.R * v), fd);
  }
  {
    const Vec w = RandomUnit(rng, nw);
    const double fd = (SignedDistance(body_i, moved(body_j, zero_v, w, eps), z) -
                       SignedDistance(body_i, moved(body_j, zero_v, w, -eps), z)) /
                      (2.0 * eps);
    compare(OtherAngularRow(c, body_j).dot(w), fd);
  }
  // Hyperplane direction, moved along the sphere.
  {
    const Vec u = RandomUnit(rng, d);
    const Vec tangent = u - z * z.dot(u);
    const Vec zp = (z + eps * tangent).normalized();
    const Vec zm = (z - eps * tangent).normalized();
    const double fd =
        (SignedDistance(body_i, body_j, zp) - SignedDistance(body_i, body_j, zm)) /
        (2.0 * eps);
    compare(c.mu.dot(tangent), fd);
  }
  return worst;
}

SuiteResult VerifyStrongDuality(const VerifyOptions& options, int d) {
  const auto start = std::chrono::steady_clock::now();
  const int n = options.pairs_per_dim;
  const int suite = d == 2 ? 1 : 2;
  std::vector<double> errors(n);
  std::vector<std::uint64_t> seeds(n);
  ParallelFor(n, options.threads, [&](int k) {
    seeds[k] = CaseSeed(options.seed, suite, k);
    std::mt19937_64 rng(seeds[k]);
    ShapedBody bi, bj;
    double w_star = 0.0;
    RandomDisjointPair(rng, d, &bi, &bj, &w_star);
    const MaximizeResult m = MaximizeH(bi, bj);
    errors[k] = std::abs(m.h - w_star) / std::max(1.0, w_star);
  });
  return Finish(d == 2 ? "strong_duality_2d" : "strong_duality_3d", n, errors,
                seeds, kStrongDualityTol, start);
}

SuiteResult VerifyWeakDuality(const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int per_pair = 10;
  const int pairs = (options.weak_samples + per_pair - 1) / per_pair;
  std::vector<double> errors(pairs);
  std::vector<std::uint64_t> seeds(pairs);
  ParallelFor(pairs, options.threads, [&](int k) {
    seeds[k] = CaseSeed(options.seed, 3, k);
    std::mt19937_64 rng(seeds[k]);
    const int d = k % 2 == 0 ? 2 : 3;
    ShapedBody bi, bj;
    double w_star = 0.0;
    RandomDisjointPair(rng, d, &bi, &bj, &w_star);
    double worst = -std::numeric_limits<double>::infinity();
    const int samples = std::min(per_pair, options.weak_samples - k * per_pair);
    for (int s = 0; s < samples; ++s) {
      const Vec z = RandomUnit(rng, d);
      worst = std::max(worst, SignedDistance(bi, bj, z) - w_star);
    }
    errors[k] = worst;
  });
  SuiteResult r = Finish("weak_duality", options.weak_samples, errors, seeds,
                         kWeakDualityTol, start);
  return r;
}

SuiteResult VerifyCoefficients(const VerifyOptions& options, int d) {
  const auto start = std::chrono::steady_clock::now();
  const int n = options.fd_configs_per_dim;
  const int suite = d == 2 ? 4 : 5;
  std::vector<double> errors(n);
  std::vector<std::uint64_t> seeds(n);
  ParallelFor(n, options.threads, [&](int k) {
    seeds[k] = CaseSeed(options.seed, suite, k);
    std::mt19937_64 rng(seeds[k]);
    ShapedBody bi, bj;
    RandomPair(rng, d, 5.0, &bi, &bj);
    const Vec z = RandomUnit(rng, d);
    errors[k] =
        CoefficientFdError(bi, bj, z, rng, kFdStep, options.coefficient_hook);
  });
  return Finish(d == 2 ? "coefficients_fd_2d" : "coefficients_fd_3d", n,
                errors, seeds, kFdTol, start);
}

std::vector<SuiteResult> VerifyQp(const VerifyOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const int n = options.qp_problems;
  std::vector<double> match(n), kkt(n);
  std::vector<std::uint64_t> seeds(n);
  ParallelFor(n, options.threads, [&](int k) {
    seeds[k] = CaseSeed(options.seed, 6, k);
    std::mt19937_64 rng(seeds[k]);
    std::uniform_int_distribution<int> vars(1, 8), cons(0, 6);
    const QpProblem p = RandomQp(rng, vars(rng), cons(rng));
    const QpSolution sol = SolveQp(p);
    const EnumerationResult ref = SolveQpByEnumeration(p);
    if (sol.status != QpStatus::kOptimal || !ref.feasible) {
      match[k] = kkt[k] = HUGE_VAL;
      return;
    }
    match[k] = (sol.u_star - ref.u).norm();
    kkt[k] = KktCheck(p, sol.u_star, sol.multipliers).Max();
  });
  return {Finish("qp_enumeration", n, match, seeds, kQpMatchTol, start),
          Finish("qp_kkt", n, kkt, seeds, kKktTol, start)};
}

VerifyReport RunVerification(const VerifyOptions& options) {
  VerifyReport report;
  report.suites.push_back(VerifyStrongDuality(options, 2));
  report.suites.push_back(VerifyStrongDuality(options, 3));
  report.suites.push_back(VerifyWeakDuality(options));
  report.suites.push_back(VerifyCoefficients(options, 2));
  report.suites.push_back(VerifyCoefficients(options, 3));
  for (SuiteResult& s : VerifyQp(options)) report.suites.push_back(s);
  for (const SuiteResult& s : report.suites) report.pass = report.pass && s.pass;
  return report;
}

std::string VerifyReportJson(const VerifyReport& report) {
  auto num = [](double x) {
    if (!std::isfinite(x)) return std::string("null");
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
  };
  std::string out = "{\n  \"pass\": ";
  out += report.pass ? "true" : "false";
  out += ",\n  \"suites\": [\n";
  for (size_t k = 0; k < report.suites.size(); ++k) {
    const SuiteResult& s = report.suites[k];
    out += "    {\"name\": \"" + s.name + "\", \"cases\": " +
           std::to_string(s.cases) + ", \"worst\": " + num(s.worst) +
           ", \"tolerance\": " + num(s.tolerance) +
           ", \"worst_seed\": " + std::to_string(s.worst_seed) +
           ", \"pass\": " + (s.pass ? "true" : "false") +
           ", \"seconds\": " + num(s.seconds) + "}";
    out += k + 1 < report.suites.size() ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

}  // namespace eshield
