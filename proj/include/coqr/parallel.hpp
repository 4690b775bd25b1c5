#ifndef COQR_PARALLEL_HPP
#define COQR_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace coqr {

// Worker count: hardware concurrency capped by the COQR_THREADS environment
// variable. Never more than the number of items.
inline int worker_count(int n_items) {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* env = std::getenv("COQR_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < threads) threads = cap;
  }
  return threads < n_items ? threads : (n_items < 1 ? 1 : n_items);
}

// Run fn(i) for i in [0, n_items). Each item must write only to its own
// output slot; callers aggregate in index order afterwards, so results do
// not depend on scheduling. The first exception is rethrown.
inline void parallel_for(int n_items, const std::function<void(int)>& fn) {
  const int threads = worker_count(n_items);
  if (threads <= 1) {
    for (int i = 0; i < n_items; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= n_items) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace coqr

#endif  // COQR_PARALLEL_HPP
