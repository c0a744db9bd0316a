#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace bsderk {

inline constexpr const char* kThreadsEnv = "BSDERK_THREADS";

/// Worker count from BSDERK_THREADS, else the hardware concurrency.
inline unsigned thread_count() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(std::min(v, 256L));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(lo, hi) on contiguous chunks of [begin, end). Each index is
/// handled by exactly one call, so per-index results do not depend on the
/// number of workers.
template <typename Body>
void parallel_for(long begin, long end, unsigned workers, Body&& body) {
  const long n = end - begin;
  if (n <= 0) return;
  workers = static_cast<unsigned>(std::min<long>(std::max(1u, workers), n));
  if (workers == 1) {
    body(begin, end);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const long chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    long lo = begin + static_cast<long>(w) * chunk, hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, w, lo, hi] {
      try {
        body(lo, hi);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bsderk
