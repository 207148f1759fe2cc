#include "segconf/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace segconf {

namespace {
constexpr int64_t kFixedChunks = 64;  // chunk grid is fixed so partials never move
}

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  int cap = hw;
  if (const char* env = std::getenv("SEGCONF_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) cap = v;
  }
  return cap;
}

std::vector<std::pair<int64_t, int64_t>> chunk_bounds(int64_t n, int /*workers*/) {
  std::vector<std::pair<int64_t, int64_t>> bounds;
  if (n <= 0) return bounds;
  const int64_t chunks = std::min<int64_t>(kFixedChunks, n);
  bounds.reserve(static_cast<size_t>(chunks));
  for (int64_t c = 0; c < chunks; ++c) {
    const int64_t begin = n * c / chunks;
    const int64_t end = n * (c + 1) / chunks;
    if (begin < end) bounds.emplace_back(begin, end);
  }
  return bounds;
}

void parallel_chunks(int64_t n, const std::function<void(int64_t, int64_t)>& fn) {
  if (n <= 0) return;
  const auto bounds = chunk_bounds(n, 0);
  const int workers = std::min<int>(worker_count(), static_cast<int>(bounds.size()));
  if (workers <= 1) {
    for (const auto& [b, e] : bounds) fn(b, e);
    return;
  }
  std::atomic<size_t> next{0};
  auto run = [&]() {
    while (true) {
      const size_t c = next.fetch_add(1);
      if (c >= bounds.size()) break;
      fn(bounds[c].first, bounds[c].second);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers - 1));
  for (int t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
}

}  // namespace segconf
