#include "perfwatt/sweep.hpp"

#include <sys/utsname.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <thread>

#include "perfwatt/error.hpp"
#include "perfwatt/report.hpp"
#include "perfwatt/thread_activity.hpp"
#include "perfwatt/trace.hpp"

namespace perfwatt {

namespace {

using Clock = std::chrono::steady_clock;

/// Time-boxed full-thread load; keeps the silicon busy without contributing
/// to any timed measurement.
void run_warmup(double seconds, unsigned threads, const SweepConfig& config) {
  if (seconds <= 0.0) return;
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(seconds));
  WorkerRegistration registration(static_cast<int>(threads));
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned k = 0; k < threads; ++k) {
    pool.emplace_back([&, k] {
      std::uint64_t i = k;
      std::uint64_t sink = 0;
      while (Clock::now() < deadline) {
        sink ^= event_checksum(config.seed ^ 0xdeadbeef, i, std::min<std::uint64_t>(config.work_scale, 4096),
                               config.layers);
        i += threads;
      }
      if (sink == 0x1234567890abcdefull) std::cerr << "";  // keep the loop observable
    });
  }
  for (auto& t : pool) t.join();
}

void validate_config(const SweepConfig& config) {
  if (config.thread_counts.empty()) {
    throw Error(ErrorCode::InvalidConfig, "thread_counts must not be empty");
  }
  for (std::size_t i = 0; i < config.thread_counts.size(); ++i) {
    if (config.thread_counts[i] == 0) {
      throw Error(ErrorCode::InvalidConfig, "thread counts must be positive");
    }
    if (i > 0 && config.thread_counts[i] <= config.thread_counts[i - 1]) {
      throw Error(ErrorCode::InvalidConfig, "thread_counts must be strictly increasing");
    }
  }
  if (config.repetitions == 0) {
    throw Error(ErrorCode::InvalidConfig, "repetitions must be at least 1");
  }
  if (config.plan.interval_ms < 10) {
    throw Error(ErrorCode::InvalidConfig, "sampling interval is below the 10 ms floor");
  }
  if (config.idle_watts && *config.idle_watts < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "idle_watts must be non-negative");
  }
}

std::string read_cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  std::string line;
  while (std::getline(in, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, line.find('\t'));
    if (line.rfind("model name", 0) == 0 || line.rfind("Processor", 0) == 0) {
      std::string value = line.substr(colon + 1);
      if (!value.empty() && value.front() == ' ') value.erase(0, 1);
      return value;
    }
  }
  return "unknown";
}

}  // namespace

HostMetadata collect_host_metadata() {
  HostMetadata meta;
  utsname uts{};
  if (uname(&uts) == 0) {
    meta.os = std::string(uts.sysname) + " " + uts.release;
  } else {
    meta.os = "unknown";
  }
  meta.cpu_model = read_cpu_model();
  char host[256] = {0};
  meta.hostname = gethostname(host, sizeof(host) - 1) == 0 ? host : "unknown";
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  meta.wall_clock_start = buf;
  return meta;
}

PowerDomain pick_primary_domain(const std::vector<PowerDomain>& measured) {
  const PowerDomain pkg(DomainKind::Package);
  if (std::find(measured.begin(), measured.end(), pkg) != measured.end()) return pkg;
  if (measured.empty()) throw Error(ErrorCode::EmptySweep, "no measured domains");
  return measured.front();
}

SweepPoint run_point(TelemetryBackend& backend, unsigned threads, unsigned repetition,
                     const SweepConfig& config, std::uint64_t events,
                     std::vector<TelemetrySeries>* raw_series_sink) {
  try {
    run_warmup(config.warmup_s, threads, config);

    SamplingPlan plan = config.plan;
    plan.record_path.reset();  // the sweep owns recording; see run_sweep
    SamplingSession session = start_sampling(backend, std::move(plan));

    WorkloadSpec spec;
    spec.events = events;
    spec.threads = threads;
    spec.seed = config.seed;
    spec.work_scale = config.work_scale;
    spec.layers = config.layers;
    spec.pin = config.pin;
    WorkloadResult workload = run_workload(spec);

    SamplingResult sampled = stop_sampling(std::move(session));
    if (sampled.stats.read_failed) {
      throw Error(ErrorCode::TransientReadFailure, "sampling aborted after repeated read failures");
    }

    SweepPoint point;
    point.threads = threads;
    point.repetition = repetition;
    point.workload = workload;
    point.sampling = sampled.stats;

    // Effective averaging window: workload span clipped to what was sampled.
    // All domains share acquisition timestamps, so any series bounds it.
    std::int64_t sampled_first = INT64_MAX;
    std::int64_t sampled_last = INT64_MIN;
    for (const auto& s : sampled.series) {
      if (s.empty()) continue;
      sampled_first = std::min(sampled_first, s.front_ns());
      sampled_last = std::max(sampled_last, s.back_ns());
    }
    if (sampled_first > sampled_last) {
      throw Error(ErrorCode::TooFewPoints, "sampling produced no data");
    }
    point.window = TimeWindow{std::max(workload.t_start_ns, sampled_first),
                              std::min(workload.t_end_ns, sampled_last)};
    if (point.window.t_start_ns >= point.window.t_end_ns) {
      throw Error(ErrorCode::EmptyWindowOverlap,
                  "no samples within the workload window; lower --interval-ms or raise --events");
    }

    for (const auto& series : sampled.series) {
      const PowerStats stats = window_power_stats(series, point.window);
      point.domains.push_back(DomainWindowStats{series.domain, series.kind, stats.mean_watts,
                                                stats.energy_joules, stats.sample_count});
    }

    std::vector<PowerDomain> measured;
    for (const auto& d : point.domains) measured.push_back(d.domain);
    const PowerDomain primary = pick_primary_domain(measured);
    const auto primary_stats = std::find_if(point.domains.begin(), point.domains.end(),
                                            [&](const auto& d) { return d.domain == primary; });

    double watts = primary_stats->mean_watts;
    if (config.idle_watts) {
      const IdleAdjustment adjusted = subtract_idle(watts, *config.idle_watts);
      watts = adjusted.watts;
      point.idle_underflow = adjusted.underflow;
    }
    if (watts > 0.0) {
      const EfficiencyFigures figures = efficiency(workload.events_per_sec, watts);
      point.efficiency_eps_per_watt = figures.events_per_sec_per_watt;
      point.joules_per_event = figures.joules_per_event;
    } else {
      point.efficiency_eps_per_watt = 0.0;
      point.joules_per_event.reset();
    }

    if (raw_series_sink) {
      for (auto& series : sampled.series) raw_series_sink->push_back(std::move(series));
    }
    return point;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PointFailed) throw;
    throw Error(ErrorCode::PointFailed,
                "threads=" + std::to_string(threads) + " repetition=" + std::to_string(repetition) +
                    ": " + e.what());
  }
}

SweepReport run_sweep(const SweepConfig& config) {
  validate_config(config);

  SweepReport report;
  report.label = config.label;
  report.config = config;
  report.metadata = collect_host_metadata();

  // Resolve calibrated sizing once so every point runs identical work.
  if (!config.events_per_point) {
    report.config.work_scale = calibrate_work_scale(config.calibration_target_s);
    const double events = std::ceil(config.min_point_seconds / config.calibration_target_s);
    report.config.events_per_point = static_cast<std::uint64_t>(std::max(1.0, events));
  }
  const std::uint64_t events = *report.config.events_per_point;

  auto backend = open_backend(config.backend);
  report.primary_domain = pick_primary_domain(backend->domains());

  std::vector<TelemetrySeries> raw_series;  // per-point series, merged at the end
  auto* sink = config.record_dir ? &raw_series : nullptr;

  for (unsigned threads : config.thread_counts) {
    for (unsigned rep = 0; rep < config.repetitions; ++rep) {
      try {
        report.points.push_back(
            run_point(*backend, threads, rep, report.config, events, sink));
      } catch (const Error& e) {
        if (!config.keep_going) throw;
        std::cerr << "perfwatt: point skipped: " << e.what() << "\n";
      }
    }
  }

  if (config.record_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*config.record_dir, ec);
    // Per-domain concatenation across points: consolidate into one series
    // per domain so the trace has one strictly-increasing run per domain.
    std::vector<TelemetrySeries> merged;
    for (const auto& series : raw_series) {
      auto it = std::find_if(merged.begin(), merged.end(),
                             [&](const TelemetrySeries& s) { return s.domain == series.domain; });
      if (it == merged.end()) {
        merged.push_back(series);
      } else {
        it->points.insert(it->points.end(), series.points.begin(), series.points.end());
      }
    }
    write_trace(*config.record_dir / "raw.trace", merged);
    write_workload_json(*config.record_dir / "workload.json", report);
  }
  return report;
}

}  // namespace perfwatt
