// Copyright 2026 The gbx Authors
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

#ifndef GBX_TASK_POOL_HPP_
#define GBX_TASK_POOL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace gbx::detail {

inline unsigned resolve_workers(unsigned requested, std::size_t tasks) {
  unsigned w = requested == 0 ? std::max(1u, std::thread::hardware_concurrency())
                              : requested;
  if (tasks < w) w = static_cast<unsigned>(std::max<std::size_t>(tasks, 1));
  return w;
}

// Runs produce(i) for i in [0, n) on up to `workers` threads and hands each
// result to commit(i, result) in index order, as soon as every earlier
// index has been committed. produce() must not throw; failures travel
// inside Result. Once stop(result) returns true no new tasks start.
template <class Result, class Produce, class Commit, class Stop>
void run_ordered(std::size_t n, unsigned workers, Produce produce,
                 Commit commit, Stop stop) {
  std::vector<std::optional<Result>> slots(n);
  std::size_t next_commit = 0;
  std::mutex mutex;
  std::atomic<std::size_t> next_task{0};
  std::atomic<bool> stopping{false};

  auto work = [&] {
    while (!stopping.load()) {
      const std::size_t i = next_task.fetch_add(1);
      if (i >= n) return;
      Result r = produce(i);
      const bool halt = stop(r);
      std::lock_guard lock(mutex);
      slots[i] = std::move(r);
      if (halt) stopping.store(true);
      while (next_commit < n && slots[next_commit]) {
        commit(next_commit, *slots[next_commit]);
        slots[next_commit].reset();
        ++next_commit;
      }
    }
  };

  const unsigned w = resolve_workers(workers, n);
  if (w <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (unsigned t = 0; t < w; ++t) pool.emplace_back(work);
  }
  // After an early stop, later finished slots are still handed over in order.
  for (std::size_t i = next_commit; i < n; ++i) {
    if (slots[i]) commit(i, *slots[i]);
  }
}

}  // namespace gbx::detail

#endif  // GBX_TASK_POOL_HPP_
