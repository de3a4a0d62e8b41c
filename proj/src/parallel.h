/* Copyright 2026 The HTMask Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef HTMASK_SRC_PARALLEL_H_
#define HTMASK_SRC_PARALLEL_H_

#include <exception>
#include <vector>

namespace htmask::internal {

// fn(i) for i in [0, n) across OpenMP threads. Exceptions cannot cross the
// parallel region; they are kept per index and the lowest-index one is
// rethrown, so the reported error does not depend on scheduling.
template <typename Fn>
void ParallelFor(int n, Fn&& fn) {
  std::vector<std::exception_ptr> failures(n > 0 ? n : 0);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
}

}  // namespace htmask::internal

#endif  // HTMASK_SRC_PARALLEL_H_
