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

#include "ellipsoid_shield/qp.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace eshield {

namespace {
constexpr double kMinRowNorm = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

double KktReport::Max() const {
  return std::max({stationarity, primal, dual, complementarity});
}

void ValidateQp(const QpProblem& problem) {
  const int n = problem.num_vars();
  if (problem.w.size() != n) throw std::invalid_argument("weight size");
  if (problem.a.rows() != problem.b.size() ||
      (problem.a.rows() > 0 && problem.a.cols() != n)) {
    throw std::invalid_argument("constraint matrix size");
  }
  if (!problem.u_nom.allFinite() || !problem.a.allFinite() ||
      !problem.b.allFinite()) {
    throw std::invalid_argument("non-finite problem data");
  }
  for (int i = 0; i < n; ++i) {
    if (!(problem.w(i) > 0.0) || !std::isfinite(problem.w(i))) {
      throw std::invalid_argument("weights must be positive");
    }
  }
  for (int k = 0; k < problem.num_constraints(); ++k) {
    if (problem.a.row(k).norm() < kMinRowNorm) {
      throw std::invalid_argument("degenerate constraint row " +
                                  std::to_string(k));
    }
  }
}

KktReport KktCheck(const QpProblem& problem, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& multipliers) {
  KktReport report;
  Eigen::VectorXd grad =
      2.0 * problem.w.cwiseProduct(u - problem.u_nom);
  for (int k = 0; k < problem.num_constraints(); ++k) {
    grad -= multipliers(k) * problem.a.row(k).transpose();
    const double slack = problem.a.row(k).dot(u) - problem.b(k);
    report.primal = std::max(report.primal, -slack);
    report.dual = std::max(report.dual, -multipliers(k));
    report.complementarity =
        std::max(report.complementarity, std::abs(multipliers(k) * slack));
  }
  report.stationarity = grad.norm();
  return report;
}

QpSolution SolveQp(const QpProblem& problem) {
  ValidateQp(problem);
  const int n = problem.num_vars();
  const int m = problem.num_constraints();

  // y = W^1/2 (u - u_nom); constraints become at_k y >= bt_k and the
  // objective is 1/2 ‖y‖^2.
  const Eigen::VectorXd w_sqrt = problem.w.cwiseSqrt();
  Eigen::MatrixXd at(m, n);
  Eigen::VectorXd bt(m), row_norm(m);
  for (int k = 0; k < m; ++k) {
    at.row(k) = problem.a.row(k).cwiseQuotient(w_sqrt.transpose());
    bt(k) = problem.b(k) - problem.a.row(k).dot(problem.u_nom);
    row_norm(k) = at.row(k).norm();
  }

  QpSolution sol;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  std::vector<int> active;
  std::vector<double> lambda;  // parallel to `active`
  std::vector<bool> is_active(m, false);

  auto active_normals = [&]() {
    Eigen::MatrixXd N(n, active.size());
    for (size_t c = 0; c < active.size(); ++c) {
      N.col(c) = at.row(active[c]).transpose();
    }
    return N;
  };
  auto drop = [&](size_t c) {
    is_active[active[c]] = false;
    active.erase(active.begin() + c);
    lambda.erase(lambda.begin() + c);
  };

  const int max_iters = 20 * (n + m) + 100;
  int iters = 0;
  while (true) {
    // Most violated constraint, normalized; ties go to the lowest index.
    int p = -1;
    double worst = 0.0;
    for (int k = 0; k < m; ++k) {
      if (is_active[k]) continue;
      const double scaled = (at.row(k).dot(y) - bt(k)) / row_norm(k);
      const double tol = 1e-13 * (1.0 + std::abs(bt(k)) / row_norm(k));
      if (scaled < -tol && scaled < worst) {
        worst = scaled;
        p = k;
      }
    }
    if (p < 0) break;

    const Eigen::VectorXd np = at.row(p).transpose();
    double lambda_p = 0.0;
    bool added = false;
    while (!added) {
      if (++iters > max_iters) {
        sol.status = QpStatus::kIterationLimit;
        break;
      }
      Eigen::VectorXd r;
      Eigen::VectorXd zdir = np;
      if (!active.empty()) {
        const Eigen::MatrixXd N = active_normals();
        r = N.colPivHouseholderQr().solve(np);
        zdir = np - N * r;
      }
      double t1 = kInf;
      int block = -1;
      for (size_t c = 0; c < active.size(); ++c) {
        if (r(c) > 1e-14 && lambda[c] / r(c) < t1) {
          t1 = lambda[c] / r(c);
          block = static_cast<int>(c);
        }
      }
      double t2 = kInf;
      const double curvature = zdir.dot(np);
      if (zdir.norm() > 1e-12 * np.norm() && curvature > 0.0) {
        t2 = (bt(p) - np.dot(y)) / curvature;
      }
      const double t = std::min(t1, t2);
      if (t == kInf) {
        sol.status = QpStatus::kInfeasible;
        sol.most_violated = p;
        break;
      }
      if (t2 < kInf) y += t * zdir;
      for (size_t c = 0; c < active.size(); ++c) lambda[c] -= t * r(c);
      lambda_p += t;
      if (t2 <= t1) {
        active.push_back(p);
        lambda.push_back(lambda_p);
        is_active[p] = true;
        added = true;
      } else {
        drop(block);
      }
    }
    if (sol.status != QpStatus::kOptimal) break;
  }

  if (sol.status == QpStatus::kOptimal && !active.empty()) {
    // Re-solve the active equality system so stationarity holds to rounding
    // rather than to the accumulated update error.
    const Eigen::MatrixXd N = active_normals();
    Eigen::VectorXd bt_active(active.size());
    for (size_t c = 0; c < active.size(); ++c) bt_active(c) = bt(active[c]);
    const Eigen::VectorXd polished =
        (N.transpose() * N).ldlt().solve(bt_active);
    if (polished.allFinite() && polished.minCoeff() >= 0.0) {
      const Eigen::VectorXd y_polished = N * polished;
      bool feasible = true;
      for (int k = 0; k < m; ++k) {
        if (at.row(k).dot(y_polished) - bt(k) < -1e-12 * (1.0 + std::abs(bt(k)))) {
          feasible = false;
        }
      }
      if (feasible) {
        y = y_polished;
        for (size_t c = 0; c < active.size(); ++c) lambda[c] = polished(c);
      }
    }
  }

  sol.u_star = problem.u_nom + y.cwiseQuotient(w_sqrt);
  sol.multipliers = Eigen::VectorXd::Zero(m);
  for (size_t c = 0; c < active.size(); ++c) {
    sol.multipliers(active[c]) = 2.0 * lambda[c];
  }
  sol.active_set = active;
  std::sort(sol.active_set.begin(), sol.active_set.end());
  sol.iterations = iters;
  sol.kkt_residual = KktCheck(problem, sol.u_star, sol.multipliers).Max();
  return sol;
}

}  // namespace eshield
