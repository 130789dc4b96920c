#include "perfwatt/workload.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <latch>
#include <system_error>
#include <thread>

#ifdef __linux__
#include <pthread.h>
#include <sched.h>
#endif

#include "perfwatt/error.hpp"
#include "perfwatt/thread_activity.hpp"
#include "perfwatt/types.hpp"

namespace perfwatt {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// Counter-mode generator: the n-th value depends only on (key, n).
struct CounterRng {
  std::uint64_t key;
  std::uint64_t counter = 0;
  std::uint64_t next() { return mix64(key + (++counter) * kGolden); }
};

double unit_interval(std::uint64_t r) { return static_cast<double>(r >> 11) * 0x1.0p-53; }

std::int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now().time_since_epoch()).count();
}

void apply_pin(PinPolicy policy, unsigned worker_index, unsigned worker_count) {
#ifdef __linux__
  if (policy == PinPolicy::None) return;
  const unsigned ncpu = std::max(1u, std::thread::hardware_concurrency());
  unsigned cpu = 0;
  if (policy == PinPolicy::Compact) {
    cpu = worker_index % ncpu;
  } else {
    const unsigned stride = std::max(1u, ncpu / std::max(1u, worker_count));
    cpu = (worker_index * stride) % ncpu;
  }
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(cpu, &set);
  // Best effort; an unpinnable host just runs unpinned.
  pthread_setaffinity_np(pthread_self(), sizeof(set), &set);
#else
  (void)policy;
  (void)worker_index;
  (void)worker_count;
#endif
}

}  // namespace

std::string_view to_string(PinPolicy policy) noexcept {
  switch (policy) {
    case PinPolicy::None: return "none";
    case PinPolicy::Compact: return "compact";
    case PinPolicy::Scatter: return "scatter";
  }
  return "none";
}

std::optional<PinPolicy> pin_policy_from_name(std::string_view name) {
  if (name == "none") return PinPolicy::None;
  if (name == "compact") return PinPolicy::Compact;
  if (name == "scatter") return PinPolicy::Scatter;
  return std::nullopt;
}

std::uint64_t event_checksum(std::uint64_t seed, std::uint64_t event_index,
                             std::uint64_t work_scale, unsigned layers) {
  if (layers == 0) throw Error(ErrorCode::InvalidArgument, "layers must be at least 1");

  const std::uint64_t key = mix64(seed ^ mix64(event_index + kGolden));
  CounterRng rng{key};

  std::vector<double> acc(layers);
  for (unsigned l = 0; l < layers; ++l) acc[l] = 1.0 + unit_interval(rng.next());

  // Bounded transforms keep the accumulators finite for any step count.
  // Statements stay single-operation so no contraction can change results.
  for (std::uint64_t step = 0; step < work_scale; ++step) {
    const unsigned l = static_cast<unsigned>(step % layers);
    const std::uint64_t r = rng.next();
    const double u = unit_interval(r);
    double x = acc[l];
    switch (r & 7u) {
      case 0: x = std::sin(x) + u; break;
      case 1: x = std::cos(x + u); break;
      case 2: x = std::sqrt(std::fabs(x) + u); break;
      case 3: x = std::exp(-std::fabs(x)) + u; break;
      case 4: x = std::log1p(std::fabs(x) + u); break;
      case 5: x = std::atan(x) + u; break;
      case 6: x = std::cbrt(x + u); break;
      default: x = std::tanh(x) + u; break;
    }
    acc[l] = x;
  }

  std::uint64_t h = key;
  for (unsigned l = 0; l < layers; ++l) {
    h = mix64(h ^ std::bit_cast<std::uint64_t>(acc[l]));
  }
  return h;
}

WorkloadResult run_workload(const WorkloadSpec& spec) {
  if (spec.events == 0) throw Error(ErrorCode::ZeroEvents, "workload needs at least one event");
  if (spec.threads == 0) throw Error(ErrorCode::InvalidArgument, "workload needs at least one thread");
  if (spec.layers == 0) throw Error(ErrorCode::InvalidArgument, "layers must be at least 1");

  struct WorkerSlot {
    std::uint64_t events = 0;
    std::uint64_t checksum = 0;
    std::int64_t start_ns = 0;
  };
  std::vector<WorkerSlot> slots(spec.threads);
  std::latch start_gate(1);
  bool aborted = false;

  std::vector<std::thread> workers;
  workers.reserve(spec.threads);
  try {
    for (unsigned k = 0; k < spec.threads; ++k) {
      workers.emplace_back([&, k] {
        apply_pin(spec.pin, k, spec.threads);
        start_gate.wait();
        if (aborted) return;
        WorkerSlot& slot = slots[k];
        slot.start_ns = now_ns();
        for (std::uint64_t i = k; i < spec.events; i += spec.threads) {
          slot.checksum ^= event_checksum(spec.seed, i, spec.work_scale, spec.layers);
          ++slot.events;
        }
      });
    }
  } catch (const std::system_error& e) {
    aborted = true;
    start_gate.count_down();
    for (auto& w : workers) w.join();
    throw Error(ErrorCode::ThreadSpawnFailure, e.what());
  }

  register_workers(static_cast<int>(spec.threads));
  start_gate.count_down();
  for (auto& w : workers) w.join();
  const std::int64_t t_end = now_ns();
  unregister_workers(static_cast<int>(spec.threads));

  WorkloadResult result;
  result.t_start_ns = t_end;
  for (const WorkerSlot& slot : slots) {
    result.events_done += slot.events;
    result.checksum ^= slot.checksum;
    result.per_thread_events.push_back(slot.events);
    result.t_start_ns = std::min(result.t_start_ns, slot.start_ns);
  }
  result.t_end_ns = t_end;
  const std::int64_t wall_ns = std::max<std::int64_t>(t_end - result.t_start_ns, 1);
  result.wall_time_s = static_cast<double>(wall_ns) * 1e-9;
  result.events_per_sec = static_cast<double>(result.events_done) / result.wall_time_s;
  return result;
}

std::uint64_t calibrate_work_scale(double target_seconds_per_event, std::uint64_t probe_events) {
  if (!(target_seconds_per_event > 0.0)) {
    throw Error(ErrorCode::TargetUnreachable, "target per-event time must be positive");
  }
  if (probe_events == 0) throw Error(ErrorCode::InvalidArgument, "probe_events must be at least 1");

  const auto measure = [&](std::uint64_t work_scale) {
    const auto t0 = Clock::now();
    std::uint64_t sink = 0;
    for (std::uint64_t i = 0; i < probe_events; ++i) {
      sink ^= event_checksum(0x5ca1ab1e, i, work_scale, 16);
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
    // sink kept alive through the comparison below
    return elapsed / static_cast<double>(probe_events) + (sink == 1 ? 1e-18 : 0.0);
  };

  constexpr std::uint64_t kMaxScale = 1ull << 40;
  std::uint64_t scale = 1024;
  double per_event = measure(scale);

  while (per_event < target_seconds_per_event && scale < kMaxScale) {
    scale *= 2;
    per_event = measure(scale);
  }
  if (per_event < target_seconds_per_event) {
    throw Error(ErrorCode::TargetUnreachable, "target exceeds the searchable work-scale range");
  }

  for (int refine = 0; refine < 4; ++refine) {
    const double rel = per_event / target_seconds_per_event;
    if (rel >= 0.75 && rel <= 1.25) return scale;
    const double scaled = static_cast<double>(scale) * target_seconds_per_event / per_event;
    scale = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(scaled));
    per_event = measure(scale);
  }
  const double rel = per_event / target_seconds_per_event;
  if (rel >= 0.75 && rel <= 1.25) return scale;
  throw Error(ErrorCode::TargetUnreachable,
              "per-event time " + format_decimal(per_event) + " s cannot be steered within 25% of " +
                  format_decimal(target_seconds_per_event) + " s; target below timer resolution");
}

}  // namespace perfwatt
