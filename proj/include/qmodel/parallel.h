// Copyright 2026 The qmodel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QMODEL_PARALLEL_H_
#define QMODEL_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qmodel {

/// Calls fn(i) for i in [0, count) on `workers` threads with a static strided
/// schedule. If any call throws, the exception from the lowest failing index
/// is rethrown after all workers finish, so failures are reported the same
/// way for any worker count.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count));
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::size_t> error_index(w, count);
  auto body = [&](std::size_t worker) {
    for (std::size_t i = worker; i < count; i += w) {
      try {
        fn(i);
      } catch (...) {
        errors[worker] = std::current_exception();
        error_index[worker] = i;
        return;
      }
    }
  };
  if (w == 1) {
    body(0);
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(w);
    for (std::size_t k = 0; k < w; ++k) threads.emplace_back(body, k);
  }
  std::size_t first = count;
  std::exception_ptr err;
  for (std::size_t k = 0; k < w; ++k) {
    if (errors[k] && error_index[k] < first) {
      first = error_index[k];
      err = errors[k];
    }
  }
  if (err) std::rethrow_exception(err);
}

/// Hardware concurrency, at least 1.
inline int default_workers() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace qmodel

#endif  // QMODEL_PARALLEL_H_
