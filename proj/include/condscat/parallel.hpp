// Copyright 2026 The condscat Authors
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

//! \file parallel.hpp
//! Deterministic parallel map: results are stored by index, so output order and values
//! never depend on the thread count. CONDSCAT_THREADS sets the worker count.

#ifndef CONDSCAT_PARALLEL_HPP_
#define CONDSCAT_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace condscat {

inline int thread_count() {
  if (const char* env = std::getenv("CONDSCAT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

inline bool& inside_parallel_region() {
  thread_local bool inside = false;
  return inside;
}

/// out[i] = fn(i) for i in [0, n). The first exception thrown by any task is rethrown.
/// Nested calls run serially on the calling worker.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, Fn fn) {
  std::vector<T> out(n);
  const int workers = std::min<int>(thread_count(), static_cast<int>(n));
  if (workers <= 1 || inside_parallel_region()) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      inside_parallel_region() = true;
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace condscat

#endif  // CONDSCAT_PARALLEL_HPP_
