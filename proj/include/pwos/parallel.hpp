#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace pwos {

inline int defaultThreadCount() {
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [0, n). Work is handed out dynamically in small chunks;
// fn must not depend on which thread runs which index.
inline void parallelFor(int threadCount, int64_t n, const std::function<void(int64_t)>& fn) {
  if (n <= 0) return;
  if (threadCount <= 1 || n == 1) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const int64_t chunk = std::max<int64_t>(1, n / (threadCount * 16));
  std::atomic<int64_t> nextStart{0};
  auto worker = [&]() {
    for (;;) {
      int64_t start = nextStart.fetch_add(chunk);
      if (start >= n) break;
      int64_t end = std::min(n, start + chunk);
      for (int64_t i = start; i < end; ++i) fn(i);
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(threadCount - 1);
  for (int t = 1; t < threadCount; ++t) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();
}

}  // namespace pwos
