// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace raisr::detail {

/// Runs fn(worker, begin, end) over `threads` contiguous slices of [0, n).
/// The first exception thrown by any worker is rethrown on the caller.
template <class Fn>
void parallel_slices(int n, int threads, Fn&& fn) {
  threads = std::clamp(threads, 1, std::max(1, n));
  if (threads == 1) {
    fn(0, 0, n);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    const int begin = int(static_cast<long long>(n) * t / threads);
    const int end = int(static_cast<long long>(n) * (t + 1) / threads);
    pool.emplace_back([&, t, begin, end] {
      try {
        fn(t, begin, end);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// fn(i) for every i in [0, n).
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  parallel_slices(n, threads, [&](int, int begin, int end) {
    for (int i = begin; i < end; ++i) fn(i);
  });
}

}  // namespace raisr::detail
