#include "asymdiff/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace asymdiff {

int thread_cap() {
  if (const char* env = std::getenv("ASYMDIFF_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int count, const std::function<void(int)>& body) {
  int workers = std::min(thread_cap(), count);
  if (workers <= 1 || count < 64) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace asymdiff
