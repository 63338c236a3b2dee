#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace nlbvp {

/// Thread cap: NLBVP_THREADS when set, else hardware concurrency.
inline int max_threads() {
  if (const char* env = std::getenv("NLBVP_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Static-chunked parallel loop. Work items write results by index, so the
/// outcome is independent of the thread count; reductions stay with the
/// caller in index order.
template <class F>
void parallel_for(int n, F&& f) {
  const int threads = std::min(max_threads(), n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += threads) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace nlbvp
