#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "perfwatt/metrics.hpp"
#include "perfwatt/sampler.hpp"
#include "perfwatt/telemetry.hpp"
#include "perfwatt/workload.hpp"

namespace perfwatt {

struct SweepConfig {
  std::vector<unsigned> thread_counts = {1, 2, 4, 8, 16};  // strictly increasing
  unsigned repetitions = 1;
  double warmup_s = 5.0;
  std::optional<std::uint64_t> events_per_point;  // unset: sized by calibration
  double calibration_target_s = 0.001;            // per-event target when calibrated
  double min_point_seconds = 60.0;                // single-thread point length when calibrated
  BackendDescriptor backend = synthetic_descriptor();
  SamplingPlan plan;
  std::optional<double> idle_watts;  // enables explicit idle subtraction
  std::uint64_t seed = 42;
  std::uint64_t work_scale = 50000;
  unsigned layers = 16;
  PinPolicy pin = PinPolicy::None;
  bool keep_going = false;
  std::string label = "sweep";
  std::optional<std::filesystem::path> record_dir;  // writes raw.trace + workload.json

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct DomainWindowStats {
  PowerDomain domain;
  SampleKind kind = SampleKind::InstantPowerWatts;
  double mean_watts = 0.0;
  double energy_joules = 0.0;
  std::int64_t sample_count = 0;

  friend bool operator==(const DomainWindowStats&, const DomainWindowStats&) = default;
};

struct SweepPoint {
  unsigned threads = 0;
  unsigned repetition = 0;
  WorkloadResult workload;
  TimeWindow window;  // effective averaging window (workload span ∩ sampled span)
  std::vector<DomainWindowStats> domains;  // measurement order
  double efficiency_eps_per_watt = 0.0;    // primary domain, after optional idle subtraction
  std::optional<double> joules_per_event;
  bool idle_underflow = false;
  SessionStats sampling;

  friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct HostMetadata {
  std::string os;
  std::string cpu_model;
  std::string hostname;
  std::string wall_clock_start;  // ISO 8601 UTC; kept out of data files

  friend bool operator==(const HostMetadata&, const HostMetadata&) = default;
};

struct SweepReport {
  std::string label;
  SweepConfig config;  // echo, with calibrated values resolved
  HostMetadata metadata;
  PowerDomain primary_domain;
  std::vector<SweepPoint> points;

  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

HostMetadata collect_host_metadata();

/// Package when measured, otherwise the first measured domain.
PowerDomain pick_primary_domain(const std::vector<PowerDomain>& measured);

/// One sweep point: untimed warmup, then the timed workload bracketed by a
/// sampling session, then the metrics join over the workload window.
/// Failures of any stage come back as PointFailed tagged with the thread
/// count.
SweepPoint run_point(TelemetryBackend& backend, unsigned threads, unsigned repetition,
                     const SweepConfig& config, std::uint64_t events,
                     std::vector<TelemetrySeries>* raw_series_sink = nullptr);

/// The full experiment: every configured thread count (ascending) times
/// repetitions, sequentially, over one backend handle. Aborts on the first
/// failed point unless config.keep_going. Writes raw.trace and
/// workload.json into config.record_dir when set.
SweepReport run_sweep(const SweepConfig& config);

}  // namespace perfwatt
