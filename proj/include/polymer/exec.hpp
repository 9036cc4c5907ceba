#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace polymer {

// Deterministic parallel map: fn(task_index) for task_index in [0, n_tasks).
// The task decomposition is fixed by n_tasks (not by thread count) and results
// are returned in task order, so any reduction over the result vector gives
// bit-identical numbers for every thread count.
template <class R, class F>
std::vector<R> run_tasks(int n_tasks, int threads, F&& fn) {
  std::vector<R> results(static_cast<size_t>(n_tasks));
  if (threads <= 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) results[static_cast<size_t>(i)] = fn(i);
    return results;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n_tasks) return;
      try {
        results[static_cast<size_t>(i)] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  int nt = std::min(threads, n_tasks);
  pool.reserve(static_cast<size_t>(nt));
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
  return results;
}

inline int default_threads() {
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

}  // namespace polymer
