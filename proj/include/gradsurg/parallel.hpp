#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace gradsurg {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n) over contiguous blocks. Results must go to
// disjoint slots; ordering-sensitive reductions stay with the caller, which
// keeps output independent of the worker count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (std::size_t i = 0; i < std::min(chunk, n); ++i) fn(i);
  for (auto& t : pool) t.join();
}

}  // namespace gradsurg
