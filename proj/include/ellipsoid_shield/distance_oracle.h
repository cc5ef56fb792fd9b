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

#ifndef ELLIPSOID_SHIELD_DISTANCE_ORACLE_H_
#define ELLIPSOID_SHIELD_DISTANCE_ORACLE_H_

#include <stdexcept>
#include <string>

#include "ellipsoid_shield/geometry.h"

namespace eshield {

// Raised when the projection root finder does not converge.
class NumericalFailure : public std::runtime_error {
 public:
  explicit NumericalFailure(const std::string& what)
      : std::runtime_error(what) {}
};

struct OracleResult {
  double distance = 0.0;
  Vec x_star;  // on body i
  Vec y_star;  // on body j
  bool overlap = false;
  bool converged = false;
  bool monotone = true;  // gap never increased along the iterations
  int iterations = 0;    // of the best start
};

struct OracleOptions {
  double step_tol = 1e-12;
  double overlap_gap = 1e-10;
  int max_iters = 100000;
  int num_starts = 8;
};

// Euclidean projection onto the closed ellipsoid.
Vec ProjectOntoEllipsoid(const ShapedBody& body, const Vec& x);

// Minimum distance between the two ellipsoids by alternating projections
// started from several points around p_j.
OracleResult MinDistance(const ShapedBody& body_i, const ShapedBody& body_j,
                         const OracleOptions& options = {});

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_DISTANCE_ORACLE_H_
