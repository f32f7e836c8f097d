#include "seizdet/common.hpp"

#include <algorithm>
#include <thread>

namespace seizdet {

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  std::size_t n_threads = threads <= 1 ? 1 : static_cast<std::size_t>(threads);
  n_threads = std::min(n_threads, count);
  if (n_threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  std::size_t chunk = (count + n_threads - 1) / n_threads;
  for (std::size_t t = 0; t < n_threads; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace seizdet
