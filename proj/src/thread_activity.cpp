#include "perfwatt/thread_activity.hpp"

#include <atomic>

namespace perfwatt {

namespace {
std::atomic<int> g_active_workers{0};
}

int active_worker_count() noexcept { return g_active_workers.load(std::memory_order_relaxed); }

void register_workers(int n) noexcept { g_active_workers.fetch_add(n, std::memory_order_relaxed); }

void unregister_workers(int n) noexcept { g_active_workers.fetch_sub(n, std::memory_order_relaxed); }

}  // namespace perfwatt
