#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sdestab {

/// Calls fn(i) for every i in [0, count) on up to `workers` threads. Work is
/// handed out in index blocks; callers write results into per-index slots, so
/// the outcome never depends on the worker count. The first exception thrown
/// by fn is rethrown after all threads finish.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn, std::size_t block = 64) {
  workers = std::max(1u, workers);
  if (workers == 1 || count <= block) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto body = [&] {
    try {
      for (;;) {
        const std::size_t lo = next.fetch_add(block);
        if (lo >= count) return;
        const std::size_t hi = std::min(count, lo + block);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(count);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace sdestab
