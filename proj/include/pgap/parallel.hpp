#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace pgap {

/// Worker cap from POINCARE_GAP_THREADS (0 = serial); defaults to the
/// hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("POINCARE_GAP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v <= 0) return 1;
    return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, n). Each index writes only its own outputs, so
/// results are identical regardless of scheduling; callers gather in index
/// order afterwards.
inline void parallel_for_index(int n, const std::function<void(int)>& fn) {
  const unsigned workers = std::min<unsigned>(worker_count(), std::max(1, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

} // namespace pgap
