// uplda/parallel.h

// Copyright 2026  The uplda Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef UPLDA_PARALLEL_H_
#define UPLDA_PARALLEL_H_

#include <cstdint>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace uplda {

/// Runs fn(begin, end) over contiguous index ranges covering [0, n) on up
/// to num_threads workers.  Each index is processed exactly once, so work
/// that writes result[i] is deterministic for any thread count.  The first
/// worker exception, if any, is rethrown on the calling thread.
inline void ParallelFor(int64_t n, int num_threads,
                        const std::function<void(int64_t, int64_t)> &fn) {
  if (n <= 0) return;
  if (num_threads < 1) num_threads = 1;
  int workers = static_cast<int>(std::min<int64_t>(num_threads, n));
  if (workers == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  int64_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    int64_t begin = w * chunk;
    int64_t end = std::min<int64_t>(begin + chunk, n);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace uplda

#endif  // UPLDA_PARALLEL_H_
