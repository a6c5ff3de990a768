// Copyright 2026 The Mapforge Authors
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

#ifndef MAPFORGE__PARALLEL_HPP_
#define MAPFORGE__PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mapforge
{

/// Worker count from MAPFORGE_THREADS, defaulting to the hardware concurrency.
inline std::size_t thread_count_from_env()
{
  if (const char * env = std::getenv("MAPFORGE_THREADS"); env != nullptr && *env != '\0') {
    try {
      const long value = std::stol(env);
      if (value > 0) {
        return static_cast<std::size_t>(value);
      }
    } catch (const std::exception &) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) on up to `threads` workers. Indices are handed
/// out dynamically; callers write results by index so output order is fixed.
/// If bodies throw, the exception from the lowest failing index is rethrown.
template <typename Body>
void parallel_for(std::size_t n, std::size_t threads, Body && body)
{
  threads = std::min(std::max<std::size_t>(threads, 1), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::size_t error_index = n;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {
          error = std::current_exception();
          error_index = i;
        }
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  for (auto & th : pool) {
    th.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace mapforge

#endif  // MAPFORGE__PARALLEL_HPP_
