#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mtreg {

/// Run body(k) for k in [0, count) on up to `threads` workers. Each index is
/// handled exactly once and results are expected in per-index slots, so the
/// outcome does not depend on scheduling. The first exception is rethrown.
template <class Body>
void parallel_for(long count, int threads, Body&& body) {
  const long workers = std::min<long>(std::max(1, threads), count);
  if (workers <= 1) {
    for (long k = 0; k < count; ++k) body(k);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (long k = next++; k < count; k = next++) {
      try {
        body(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (long w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace mtreg
