#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace cachecast {

// Worker count from CACHECAST_THREADS; unset, 0 or unparsable means one per core.
inline unsigned worker_count() {
  unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("CACHECAST_THREADS");
  if (env == nullptr) return hardware;
  try {
    const long requested = std::stol(env);
    if (requested > 0) return static_cast<unsigned>(requested);
  } catch (const std::exception&) {
  }
  return hardware;
}

// Calls body(i) for every i in [0, count). Each index is handled exactly once;
// callers write results by index so the outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, Body body, unsigned workers = worker_count()) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    try {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = count;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace cachecast
