#include "perfwatt/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "perfwatt/error.hpp"
#include "perfwatt/trace.hpp"

namespace perfwatt {

namespace detail {

using Clock = std::chrono::steady_clock;

struct SessionState {
  TelemetryBackend* backend = nullptr;
  SamplingPlan plan;
  std::vector<TelemetrySeries> series;
  std::vector<std::int64_t> acquisitions;  // one timestamp per successful read_all
  SessionStats stats;
  Clock::time_point start;
  std::thread worker;
  std::mutex mutex;
  std::condition_variable cv;
  bool stop_requested = false;

  void store(const std::vector<SensorSample>& samples) {
    if (samples.empty()) return;
    acquisitions.push_back(samples.front().timestamp_ns);
    for (const auto& sample : samples) {
      auto it = std::find_if(series.begin(), series.end(),
                             [&](const TelemetrySeries& s) { return s.domain == sample.domain; });
      if (it == series.end()) continue;  // not a requested domain
      if (it->points.empty()) it->kind = sample.kind;
      it->points.emplace_back(sample.timestamp_ns, sample.value);
    }
  }

  /// One acquisition with up to 3 retries on transient failures.
  /// Returns false when sampling must end (persistent failure or closed).
  bool acquire() {
    for (int attempt = 0;; ++attempt) {
      try {
        store(backend->read_all());
        return true;
      } catch (const Error& e) {
        if (e.code() == ErrorCode::BackendClosed) {
          stats.backend_exhausted = true;
          return false;
        }
        if (e.code() == ErrorCode::TransientReadFailure && attempt < 3) {
          ++stats.retries;
          continue;
        }
        stats.read_failed = true;
        return false;
      }
    }
  }

  void run_paced() {
    const auto interval = std::chrono::milliseconds(plan.interval_ms);
    std::int64_t tick = 1;
    while (true) {
      const auto deadline = start + tick * interval;
      {
        std::unique_lock lock(mutex);
        if (cv.wait_until(lock, deadline, [&] { return stop_requested; })) return;
      }
      if (!acquire()) return;
      const auto now = Clock::now();
      std::int64_t next = tick + 1;
      // Skip missed deadlines instead of bursting to catch up.
      const std::int64_t due = std::chrono::duration_cast<std::chrono::milliseconds>(now - start).count() /
                                   plan.interval_ms +
                               1;
      if (due > next) {
        stats.skipped_ticks += static_cast<int>(due - next);
        next = due;
      }
      tick = next;
    }
  }

  void run_drain() {
    while (true) {
      {
        std::lock_guard lock(mutex);
        if (stop_requested) return;
      }
      if (!acquire()) return;
    }
  }
};

}  // namespace detail

SamplingSession::SamplingSession(SamplingSession&&) noexcept = default;
SamplingSession& SamplingSession::operator=(SamplingSession&&) noexcept = default;

SamplingSession::~SamplingSession() {
  if (!state_) return;
  {
    std::lock_guard lock(state_->mutex);
    state_->stop_requested = true;
  }
  state_->cv.notify_all();
  if (state_->worker.joinable()) state_->worker.join();
  state_->backend->release_sampler();
}

SamplingSession start_sampling(TelemetryBackend& backend, SamplingPlan plan) {
  if (plan.interval_ms < 10) {
    throw Error(ErrorCode::InvalidPlan,
                "interval " + std::to_string(plan.interval_ms) + " ms is below the 10 ms floor");
  }
  if (backend.closed()) throw Error(ErrorCode::BackendClosed, "backend is closed");

  if (plan.domains.empty()) {
    plan.domains = backend.domains();
  } else {
    for (const auto& domain : plan.domains) {
      const auto& advertised = backend.domains();
      if (std::find(advertised.begin(), advertised.end(), domain) == advertised.end()) {
        throw Error(ErrorCode::InvalidPlan, "domain " + domain.token() + " is not advertised by the backend");
      }
    }
  }

  if (!backend.try_acquire_sampler()) {
    throw Error(ErrorCode::AlreadySampling, "backend already has an active sampling session");
  }

  auto state = std::make_unique<detail::SessionState>();
  state->backend = &backend;
  state->plan = std::move(plan);
  for (const auto& domain : state->plan.domains) {
    state->series.push_back(TelemetrySeries{domain, SampleKind::InstantPowerWatts, {}});
  }
  state->start = detail::Clock::now();

  // First sample immediately at start, before any pacing.
  const bool alive = state->acquire();

  if (alive) {
    detail::SessionState* raw = state.get();
    try {
      state->worker = backend.realtime() ? std::thread([raw] { raw->run_paced(); })
                                         : std::thread([raw] { raw->run_drain(); });
    } catch (const std::system_error& e) {
      backend.release_sampler();
      throw Error(ErrorCode::ThreadSpawnFailure, e.what());
    }
  }

  SamplingSession session;
  session.state_ = std::move(state);
  return session;
}

SamplingResult stop_sampling(SamplingSession session) {
  auto state = std::move(session.state_);
  if (!state) throw Error(ErrorCode::InvalidArgument, "session already stopped");

  {
    std::lock_guard lock(state->mutex);
    state->stop_requested = true;
  }
  state->cv.notify_all();
  if (state->worker.joinable()) state->worker.join();
  state->backend->release_sampler();

  SamplingResult result;
  result.stats = state->stats;
  result.stats.sample_count = static_cast<std::int64_t>(state->acquisitions.size());
  if (state->acquisitions.size() >= 2) {
    const auto& acq = state->acquisitions;
    std::vector<double> gaps_ms;
    gaps_ms.reserve(acq.size() - 1);
    for (std::size_t i = 1; i < acq.size(); ++i) {
      gaps_ms.push_back(static_cast<double>(acq[i] - acq[i - 1]) * 1e-6);
    }
    double sum = 0.0;
    double max = 0.0;
    for (double g : gaps_ms) {
      sum += g;
      max = std::max(max, g);
    }
    const double mean = sum / static_cast<double>(gaps_ms.size());
    double sq = 0.0;
    for (double g : gaps_ms) sq += (g - mean) * (g - mean);
    result.stats.mean_interval_ms = mean;
    result.stats.max_interval_ms = max;
    result.stats.stddev_interval_ms = std::sqrt(sq / static_cast<double>(gaps_ms.size()));
  }
  result.series = std::move(state->series);

  if (state->plan.record_path) {
    write_trace(*state->plan.record_path, result.series);
  }
  return result;
}

IntervalStats interval_stats(const TelemetrySeries& series) {
  if (series.size() < 2) {
    throw Error(ErrorCode::TooFewPoints, "need at least 2 points for interval statistics");
  }
  IntervalStats stats;
  std::vector<double> gaps_ms;
  gaps_ms.reserve(series.size() - 1);
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    gaps_ms.push_back(static_cast<double>(series.points[i].first - series.points[i - 1].first) * 1e-6);
  }
  double sum = 0.0;
  for (double g : gaps_ms) {
    sum += g;
    stats.max_ms = std::max(stats.max_ms, g);
  }
  stats.mean_ms = sum / static_cast<double>(gaps_ms.size());
  double sq = 0.0;
  for (double g : gaps_ms) sq += (g - stats.mean_ms) * (g - stats.mean_ms);
  stats.stddev_ms = std::sqrt(sq / static_cast<double>(gaps_ms.size()));
  return stats;
}

}  // namespace perfwatt
