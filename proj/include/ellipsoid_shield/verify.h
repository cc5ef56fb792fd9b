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

#ifndef ELLIPSOID_SHIELD_VERIFY_H_
#define ELLIPSOID_SHIELD_VERIFY_H_

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ellipsoid_shield/geometry.h"
#include "ellipsoid_shield/qp.h"
#include "ellipsoid_shield/separation.h"

namespace eshield {

// Random rotation, uniform over SO(d).
Mat RandomRotation(std::mt19937_64& rng, int d);

// Random ellipsoid pair with axis ratios up to `max_ratio`, at a random
// relative placement. The pair may overlap; callers filter with the oracle.
void RandomPair(std::mt19937_64& rng, int d, double max_ratio, ShapedBody* i,
                ShapedBody* j);

// Random strictly feasible QP with the given sizes.
QpProblem RandomQp(std::mt19937_64& rng, int num_vars, int num_constraints);

// Exhaustive active-set enumeration: solves the equality-constrained
// problem for every subset of constraints and keeps the best feasible
// point. Exponential in the number of constraints; meant as a reference.
struct EnumerationResult {
  bool feasible = false;
  Eigen::VectorXd u;
  double objective = 0.0;
};
EnumerationResult SolveQpByEnumeration(const QpProblem& problem);

struct VerifyOptions {
  int pairs_per_dim = 500;
  int weak_samples = 10000;
  int fd_configs_per_dim = 100;
  int qp_problems = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  // Applied to every coefficient set before it is compared against finite
  // differences. Lets a test plant a deliberate error.
  std::function<void(CbfCoefficients&)> coefficient_hook;
};

struct SuiteResult {
  std::string name;
  int cases = 0;
  double worst = 0.0;      // worst error (or violation) observed
  double tolerance = 0.0;
  std::uint64_t worst_seed = 0;  // case seed reproducing the worst error
  bool pass = true;
  double seconds = 0.0;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool pass = true;
};

// Seed of case `index` of a suite, derived from the campaign seed.
std::uint64_t CaseSeed(std::uint64_t seed, int suite, int index);

SuiteResult VerifyStrongDuality(const VerifyOptions& options, int d);
SuiteResult VerifyWeakDuality(const VerifyOptions& options);
SuiteResult VerifyCoefficients(const VerifyOptions& options, int d);
// Solution match against enumeration, then the KKT residuals.
std::vector<SuiteResult> VerifyQp(const VerifyOptions& options);

VerifyReport RunVerification(const VerifyOptions& options);
std::string VerifyReportJson(const VerifyReport& report);

// Largest relative disagreement between every coefficient channel and a
// central finite difference of h with step eps, for one configuration.
// Relative error is |analytic - fd| / max(1, |fd|).
double CoefficientFdError(const ShapedBody& body_i, const ShapedBody& body_j,
                          const Vec& z, std::mt19937_64& rng, double eps,
                          const std::function<void(CbfCoefficients&)>& hook);

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_VERIFY_H_
