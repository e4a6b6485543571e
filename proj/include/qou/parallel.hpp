#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace qou {

// Static partition of [0,n) over worker threads. Bodies must write to
// disjoint slots; results are then independent of the thread count.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& body) {
  if (n == 0) return;
  const unsigned hw = std::max(1u, threads ? threads : std::thread::hardware_concurrency());
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = static_cast<std::size_t>(w) * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace qou
