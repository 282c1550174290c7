#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pblab {

// Worker cap: PBLAB_WORKERS env var, else hardware concurrency.
inline int max_workers() {
  if (const char* s = std::getenv("PBLAB_WORKERS")) {
    const int v = std::atoi(s);
    if (v > 0) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Run body(i) for i in [0, n).  Each index writes only to its own output
// slot, so results are identical regardless of the worker count.  Exceptions
// are rethrown on the calling thread (first one wins).
inline void parallel_for(int n, const std::function<void(int)>& body) {
  const int workers = std::min(max_workers(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mutex;
  auto run = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace pblab
