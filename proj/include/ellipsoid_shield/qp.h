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

#ifndef ELLIPSOID_SHIELD_QP_H_
#define ELLIPSOID_SHIELD_QP_H_

#include <vector>

#include <Eigen/Dense>

namespace eshield {

// minimize (u - u_nom)^T diag(w) (u - u_nom)  subject to  a_k u >= b_k.
struct QpProblem {
  Eigen::VectorXd w;
  Eigen::VectorXd u_nom;
  Eigen::MatrixXd a;  // one constraint per row
  Eigen::VectorXd b;

  int num_vars() const { return static_cast<int>(u_nom.size()); }
  int num_constraints() const { return static_cast<int>(b.size()); }
};

// Throws std::invalid_argument on size mismatches, non-positive weights or a
// constraint row with norm below 1e-12.
void ValidateQp(const QpProblem& problem);

enum class QpStatus { kOptimal, kInfeasible, kIterationLimit };

struct KktReport {
  double stationarity = 0.0;     // ‖2W(u - u_nom) - sum lambda_k a_k^T‖
  double primal = 0.0;           // max(0, b_k - a_k u)
  double dual = 0.0;             // max(0, -lambda_k)
  double complementarity = 0.0;  // max |lambda_k (a_k u - b_k)|

  double Max() const;
};

struct QpSolution {
  QpStatus status = QpStatus::kOptimal;
  Eigen::VectorXd u_star;
  Eigen::VectorXd multipliers;
  std::vector<int> active_set;
  double kkt_residual = 0.0;
  int iterations = 0;
  int most_violated = -1;  // set when infeasible
};

// Dual active-set method (Goldfarb-Idnani) in the coordinates where the
// objective is a plain squared norm. Starts from u_nom, so no phase one.
QpSolution SolveQp(const QpProblem& problem);

// Recomputes the KKT residuals from scratch.
KktReport KktCheck(const QpProblem& problem, const Eigen::VectorXd& u,
                   const Eigen::VectorXd& multipliers);

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_QP_H_
