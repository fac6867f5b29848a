#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace bergman {

inline int worker_count() {
  if (const char* env = std::getenv("BERGMAN_WORKERS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// static block partition; fn(i) must write only to slot i of its outputs,
// so results are deterministic regardless of scheduling
inline void parallel_for(long n, const std::function<void(long)>& fn) {
  int workers = std::min<long>(worker_count(), n);
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  long chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    long lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (long i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace bergman
