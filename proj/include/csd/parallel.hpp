#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace csd {

struct ExecutionPolicy {
  /// Worker threads; 0 means "read CSD_THREADS, else 1".
  int threads = 1;
  /// Reduce partial sums in task-index order, so results do not depend on scheduling.
  bool deterministic = true;
};

int resolve_threads(int requested);

/// Runs fn(task) for task in [0, num_tasks) on up to `threads` workers with
/// dynamic scheduling. The first exception thrown by any task is rethrown.
template <class Fn>
void run_tasks(std::size_t num_tasks, int threads, Fn&& fn) {
  const int workers = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(num_tasks)));
  if (workers <= 1) {
    for (std::size_t t = 0; t < num_tasks; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= num_tasks) return;
      try {
        fn(t);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(num_tasks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers - 1));
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace csd
