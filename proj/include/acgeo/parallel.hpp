#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace acgeo {

// Deterministic indexed parallel map: runs fn(i) for i in [0, n).  Each call
// must write only to its own output slot, so results are identical for any
// worker count.  If several calls throw, the exception with the lowest index
// is rethrown (again independent of scheduling).
inline void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  int w = std::max(1, std::min(workers, n));
  if (w == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errs(n);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (int t = 0; t < w; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          errs[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (int i = 0; i < n; ++i)
    if (errs[i]) std::rethrow_exception(errs[i]);
}

}  // namespace acgeo
