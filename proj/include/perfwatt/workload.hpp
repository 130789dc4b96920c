#pragma once

#include <cstdint>
#include <string_view>
#include <optional>
#include <vector>

namespace perfwatt {

enum class PinPolicy { None, Compact, Scatter };

std::string_view to_string(PinPolicy policy) noexcept;
std::optional<PinPolicy> pin_policy_from_name(std::string_view name);

struct WorkloadSpec {
  std::uint64_t events = 0;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::uint64_t work_scale = 50000;  // arithmetic steps per event
  unsigned layers = 16;              // synthetic geometry depth
  PinPolicy pin = PinPolicy::None;
};

struct WorkloadResult {
  std::uint64_t events_done = 0;
  double wall_time_s = 0.0;
  double events_per_sec = 0.0;
  std::uint64_t checksum = 0;  // XOR over all event checksums, order-independent
  std::vector<std::uint64_t> per_thread_events;
  std::int64_t t_start_ns = 0;  // monotonic; first worker start
  std::int64_t t_end_ns = 0;    // monotonic; last worker joined

  friend bool operator==(const WorkloadResult&, const WorkloadResult&) = default;
};

/// Pure per-event kernel: a counter-based generator keyed by (seed, event
/// index) drives work_scale steps of transcendental arithmetic across
/// `layers` accumulators; the accumulators' bit patterns are hashed to 64
/// bits. Identical inputs give identical output on a given host.
std::uint64_t event_checksum(std::uint64_t seed, std::uint64_t event_index,
                             std::uint64_t work_scale, unsigned layers);

/// Runs spec.events events statically partitioned by index modulo
/// spec.threads. Workers register with the thread-activity hook for the
/// duration of the run. Throws ZeroEvents or ThreadSpawnFailure.
WorkloadResult run_workload(const WorkloadSpec& spec);

/// Finds a work_scale whose single-thread per-event time lands within ±25%
/// of the target on this host, by timed geometric search plus linear
/// refinement. Throws TargetUnreachable for targets at or below the timer's
/// useful resolution.
std::uint64_t calibrate_work_scale(double target_seconds_per_event, std::uint64_t probe_events = 8);

}  // namespace perfwatt
