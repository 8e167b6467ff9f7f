#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace wgf {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> value{1};
  return value;
}
}  // namespace detail

/// Number of worker threads used by the index-parallel loops. Results do not
/// depend on this value: every index is computed by one worker with a fixed
/// summation order, and reductions happen afterwards in index order.
inline void set_num_threads(unsigned n) { detail::thread_setting() = std::max(1u, n); }
inline unsigned num_threads() { return detail::thread_setting(); }

/// Calls fn(i) for i in [0, n), splitting the range into contiguous blocks.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(num_threads(), n / 64 + 1);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t lo = w * block;
    const std::size_t hi = std::min(n, lo + block);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (std::size_t i = 0; i < std::min(n, block); ++i) fn(i);
  for (auto& t : pool) t.join();
}

}  // namespace wgf
