// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include <cstddef>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>

namespace splatgym {

/// Default worker count: SPLATGYM_WORKERS if set, else hardware concurrency.
inline int default_worker_count() {
  if (const char* env = std::getenv("SPLATGYM_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Fixed-size worker pool. Work items must write disjoint outputs; results
/// never depend on the worker count.
class WorkerPool {
 public:
  explicit WorkerPool(int workers = default_worker_count())
      : workers_(workers < 1 ? 1 : workers),
        arena_(std::make_unique<tbb::task_arena>(workers_)) {}

  int workers() const { return workers_; }

  template <typename Fn>
  void parallel_for(std::size_t count, Fn&& fn) {
    if (count == 0) return;
    if (workers_ == 1 || count == 1) {
      for (std::size_t i = 0; i < count; ++i) fn(i);
      return;
    }
    arena_->execute([&] {
      tbb::parallel_for(tbb::blocked_range<std::size_t>(0, count),
                        [&](const tbb::blocked_range<std::size_t>& r) {
                          for (std::size_t i = r.begin(); i != r.end(); ++i) fn(i);
                        });
    });
  }

 private:
  int workers_;
  std::unique_ptr<tbb::task_arena> arena_;
};

}  // namespace splatgym
