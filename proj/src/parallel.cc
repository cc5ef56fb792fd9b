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

#include "ellipsoid_shield/parallel.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace eshield {

int ThreadCountFromEnv() {
  const char* raw = std::getenv("ELLIPSOID_SHIELD_THREADS");
  int requested = 0;
  if (raw != nullptr && *raw != '\0') {
    try {
      requested = std::stoi(raw);
    } catch (const std::exception&) {
      return 1;
    }
  }
  if (requested < 0) return 1;
  if (requested == 0) {
    return std::max(1u, std::thread::hardware_concurrency());
  }
  return requested;
}

void ParallelFor(int count, int threads, const std::function<void(int)>& fn) {
  const int workers = std::min(std::max(threads, 1), count);
  if (workers <= 1) {
    for (int k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&]() {
    for (int k = next++; k < count; k = next++) {
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace eshield
