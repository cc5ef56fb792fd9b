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

#ifndef ELLIPSOID_SHIELD_PARALLEL_H_
#define ELLIPSOID_SHIELD_PARALLEL_H_

#include <functional>

namespace eshield {

// Worker count from ELLIPSOID_SHIELD_THREADS; unset or 0 means the hardware
// concurrency. Malformed values fall back to 1.
int ThreadCountFromEnv();

// Calls fn(k) for k in [0, count) on up to `threads` workers. Each index is
// visited exactly once; results must be written to per-index slots so the
// outcome does not depend on scheduling. The first exception is rethrown.
void ParallelFor(int count, int threads, const std::function<void(int)>& fn);

}  // namespace eshield

#endif  // ELLIPSOID_SHIELD_PARALLEL_H_
