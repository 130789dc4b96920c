#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "perfwatt/telemetry.hpp"
#include "perfwatt/types.hpp"

namespace perfwatt {

struct SamplingPlan {
  int interval_ms = 1000;
  std::vector<PowerDomain> domains;  // empty means all advertised domains
  std::optional<std::filesystem::path> record_path;

  friend bool operator==(const SamplingPlan&, const SamplingPlan&) = default;
};

struct SessionStats {
  std::int64_t sample_count = 0;  // acquisitions
  double mean_interval_ms = 0.0;
  double max_interval_ms = 0.0;
  double stddev_interval_ms = 0.0;
  int retries = 0;        // transient read failures that were retried
  int skipped_ticks = 0;  // missed deadlines, never caught up in bursts
  bool read_failed = false;
  bool backend_exhausted = false;  // replay trace drained

  friend bool operator==(const SessionStats&, const SessionStats&) = default;
};

struct SamplingResult {
  std::vector<TelemetrySeries> series;  // one per requested domain, plan order
  SessionStats stats;
};

namespace detail {
struct SessionState;
}

/// Handle to one in-flight sampling run. Destroying an unstopped session
/// shuts the worker down and discards the data.
class SamplingSession {
 public:
  SamplingSession(SamplingSession&&) noexcept;
  SamplingSession& operator=(SamplingSession&&) noexcept;
  ~SamplingSession();

 private:
  friend SamplingSession start_sampling(TelemetryBackend&, SamplingPlan);
  friend SamplingResult stop_sampling(SamplingSession);
  SamplingSession() = default;
  std::unique_ptr<detail::SessionState> state_;
};

/// Starts fixed-rate sampling on an absolute schedule (start + k×interval;
/// no drift, missed ticks are skipped and counted). The first sample is
/// taken synchronously before this returns. A non-realtime backend (replay)
/// is drained as fast as it reads instead of being paced.
/// Throws InvalidPlan, AlreadySampling, or BackendClosed.
SamplingSession start_sampling(TelemetryBackend& backend, SamplingPlan plan);

/// Stops the session, releases the backend, and returns the collected
/// series plus statistics. Best-effort: after persistent read failures the
/// partial series come back with stats.read_failed set. Writes the raw
/// trace if the plan asked for one.
SamplingResult stop_sampling(SamplingSession session);

struct IntervalStats {
  double mean_ms = 0.0;
  double max_ms = 0.0;
  double stddev_ms = 0.0;
};

/// Statistics over successive timestamp differences. Throws TooFewPoints
/// for series shorter than 2.
IntervalStats interval_stats(const TelemetrySeries& series);

}  // namespace perfwatt
