#include "dtmi/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace dtmi {

namespace {
std::atomic<int> g_max_workers{0};  // 0 = derive from hardware
}

int max_worker_threads() {
  const int configured = g_max_workers.load(std::memory_order_relaxed);
  if (configured > 0) return configured;
  const unsigned hw = std::thread::hardware_concurrency();
  return std::clamp(static_cast<int>(hw), 1, 8);
}

void set_max_worker_threads(int workers) {
  g_max_workers.store(std::max(workers, 0), std::memory_order_relaxed);
}

}  // namespace dtmi
