#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace chl {

/// Number of worker threads: the hardware concurrency, at least 1.
inline unsigned worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs fn(begin, end) over a partition of [0, count) on worker threads.
/// Chunks are contiguous and assigned deterministically; callers own any
/// result ordering (write by index, merge in index order).
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned max_threads = 0) {
  if (count == 0) return;
  unsigned workers = worker_count();
  if (max_threads != 0 && max_threads < workers) workers = max_threads;
  if (workers > count) workers = static_cast<unsigned>(count);
  if (workers <= 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = static_cast<std::size_t>(w) * chunk;
    if (begin >= count) break;
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace chl
