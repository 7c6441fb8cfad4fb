#include "samg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace samg {

int worker_count() {
  static const int cached = [] {
    if (const char* env = std::getenv("SAMG_THREADS")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && end && *end == '\0' && v >= 1) {
        return static_cast<int>(std::min<long>(v, 1024));
      }
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }();
  return cached;
}

void parallel_for(long n, const std::function<void(long)>& body) {
  if (n <= 0) return;
  const int workers = static_cast<int>(std::min<long>(worker_count(), n));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<long> next{0};
  const long chunk = std::max<long>(1, n / (static_cast<long>(workers) * 8));
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto drain = [&] {
    for (;;) {
      const long begin = next.fetch_add(chunk);
      if (begin >= n) return;
      const long end = std::min(begin + chunk, n);
      try {
        for (long i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(n);  // tell the other workers to wind down
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(drain);
  drain();
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace samg
