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

#include "ellipsoid_shield/certify.h"

namespace eshield {

CertifiedMaximum MaximizeHCertified(const ShapedBody& body_i,
                                    const ShapedBody& body_j,
                                    const MaximizeOptions& options) {
  CertifiedMaximum out;
  out.oracle = MinDistance(body_i, body_j);
  out.overlap = out.oracle.overlap;
  out.maximum = MaximizeH(body_i, body_j, options);
  return out;
}

}  // namespace eshield
