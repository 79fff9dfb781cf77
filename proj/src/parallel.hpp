#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bf {

/*
 * Runs fn(begin, end) over [0, n) in blocks. Work is handed out through
 * an atomic cursor, so callers must make per-index results independent
 * of the partition (all scan sampling does, via per-index substreams).
 * The first exception thrown by any worker is rethrown on the caller.
 */
inline void parallel_for_blocks(int64_t n, int jobs,
                                const std::function<void(int64_t, int64_t)>& fn) {
  if (n <= 0) return;
  if (jobs < 1) jobs = 1;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw > 0 && jobs > static_cast<int>(hw) * 4) jobs = static_cast<int>(hw) * 4;
  int64_t block = n / (static_cast<int64_t>(jobs) * 8);
  if (block < 1) block = 1;
  if (block > 8192) block = 8192;
  if (jobs == 1) {
    for (int64_t b = 0; b < n; b += block) fn(b, std::min(n, b + block));
    return;
  }
  std::atomic<int64_t> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error = nullptr;
  std::mutex err_mu;
  auto worker = [&]() {
    for (;;) {
      int64_t b = cursor.fetch_add(block);
      if (b >= n || failed.load()) return;
      int64_t e = std::min(n, b + block);
      try {
        fn(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(jobs));
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

} // namespace bf
