#include "rieffel/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace rieffel {

int worker_count() {
  if (const char* env = std::getenv("RIEFFEL_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body) {
  int workers = worker_count();
  if (workers <= 1 || count < 256) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  workers = static_cast<int>(std::min<std::int64_t>(workers, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::int64_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    std::int64_t lo = w * chunk;
    std::int64_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] {
      for (std::int64_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace rieffel
