#pragma once

// Deterministic parallel map over an index range. Worker count comes from the
// FBC_WORKERS environment variable (default 1); results are written to
// per-index slots, so the outcome does not depend on scheduling.

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace fbc {

inline int worker_count() {
  const char* env = std::getenv("FBC_WORKERS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n > 0 ? n : 1;
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  int workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> threads;
  std::size_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([lo, hi, &fn]() {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace fbc
