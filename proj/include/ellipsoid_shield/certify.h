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

#ifndef ELLIPSOID_SHIELD_CERTIFY_H_
#define ELLIPSOID_SHIELD_CERTIFY_H_

#include "ellipsoid_shield/distance_oracle.h"
#include "ellipsoid_shield/separation.h"

namespace eshield {

struct CertifiedMaximum {
  MaximizeResult maximum;
  OracleResult oracle;
  bool overlap = false;
};

// MaximizeH together with an oracle check for overlapping bodies.
CertifiedMaximum MaximizeHCertified(const ShapedBody& body_i,
                                    const ShapedBody& body_j,
                                    const MaximizeOptions& options = {});

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_CERTIFY_H_
