#include "perfwatt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "perfwatt/error.hpp"

namespace perfwatt {

namespace {

void require_kind(const TelemetrySeries& series, SampleKind expected, const char* op) {
  if (series.kind != expected) {
    throw Error(ErrorCode::KindMismatch,
                std::string(op) + " needs a " + std::string(to_token(expected)) + " series, got " +
                    std::string(to_token(series.kind)));
  }
}

/// Clips the window to the series' data range. Returns an inverted range when
/// there is no overlap.
TimeWindow clip_to_data(const TelemetrySeries& series, TimeWindow window) {
  return TimeWindow{std::max(window.t_start_ns, series.front_ns()),
                    std::min(window.t_end_ns, series.back_ns())};
}

/// Linear interpolation at t, which must lie within the data range.
double value_at(const TelemetrySeries& series, std::int64_t t_ns) {
  const auto& pts = series.points;
  auto it = std::lower_bound(pts.begin(), pts.end(), t_ns,
                             [](const auto& point, std::int64_t t) { return point.first < t; });
  if (it != pts.end() && it->first == t_ns) return it->second;
  const auto& hi = *it;
  const auto& lo = *(it - 1);
  const double span = static_cast<double>(hi.first - lo.first);
  const double frac = static_cast<double>(t_ns - lo.first) / span;
  return lo.second + (hi.second - lo.second) * frac;
}

std::int64_t points_in(const TelemetrySeries& series, TimeWindow window) {
  std::int64_t n = 0;
  for (const auto& [t, v] : series.points) {
    if (t >= window.t_start_ns && t <= window.t_end_ns) ++n;
  }
  return n;
}

}  // namespace

double integrate_power(const TelemetrySeries& series, TimeWindow window) {
  require_kind(series, SampleKind::InstantPowerWatts, "integrate_power");
  if (series.size() < 2) {
    throw Error(ErrorCode::TooFewPoints, "need at least 2 power samples to integrate");
  }
  const TimeWindow w = clip_to_data(series, window);
  if (w.t_start_ns > w.t_end_ns) {
    throw Error(ErrorCode::EmptyWindowOverlap, "window does not overlap the series");
  }
  if (w.t_start_ns == w.t_end_ns) return 0.0;

  // Nodes: interpolated window edges plus every sample strictly inside.
  double energy = 0.0;
  std::int64_t prev_t = w.t_start_ns;
  double prev_v = value_at(series, prev_t);
  for (const auto& [t, v] : series.points) {
    if (t <= w.t_start_ns) continue;
    if (t >= w.t_end_ns) break;
    energy += 0.5 * (prev_v + v) * (static_cast<double>(t - prev_t) * 1e-9);
    prev_t = t;
    prev_v = v;
  }
  const double end_v = value_at(series, w.t_end_ns);
  energy += 0.5 * (prev_v + end_v) * (static_cast<double>(w.t_end_ns - prev_t) * 1e-9);
  return energy;
}

double energy_from_counter(const TelemetrySeries& series, TimeWindow window) {
  require_kind(series, SampleKind::EnergyCounterJoules, "energy_from_counter");
  if (series.size() < 2) {
    throw Error(ErrorCode::TooFewPoints, "need at least 2 counter samples");
  }
  for (std::size_t i = 1; i < series.points.size(); ++i) {
    if (series.points[i].second < series.points[i - 1].second) {
      throw Error(ErrorCode::NonMonotoneCounter,
                  "cumulative energy decreases at point " + std::to_string(i) +
                      "; wrap correction failed upstream");
    }
  }
  const TimeWindow w = clip_to_data(series, window);
  if (w.t_start_ns > w.t_end_ns) {
    throw Error(ErrorCode::EmptyWindowOverlap, "window does not overlap the series");
  }
  return value_at(series, w.t_end_ns) - value_at(series, w.t_start_ns);
}

UncoreDerivation derive_uncore(const TelemetrySeries& pkg, const TelemetrySeries& pp0,
                               std::optional<std::int64_t> pairing_tolerance_ns) {
  if (pkg.kind != pp0.kind) {
    throw Error(ErrorCode::KindMismatch, "package and core series have different sample kinds");
  }
  if (pkg.empty() || pp0.empty()) {
    throw Error(ErrorCode::UnalignableSeries, "empty input series");
  }

  std::int64_t tolerance = 0;
  if (pairing_tolerance_ns) {
    tolerance = *pairing_tolerance_ns;
  } else {
    if (pkg.size() < 2) {
      throw Error(ErrorCode::UnalignableSeries,
                  "cannot derive a pairing tolerance from a single-point series; pass one explicitly");
    }
    std::vector<std::int64_t> gaps;
    gaps.reserve(pkg.size() - 1);
    for (std::size_t i = 1; i < pkg.points.size(); ++i) {
      gaps.push_back(pkg.points[i].first - pkg.points[i - 1].first);
    }
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    tolerance = gaps[gaps.size() / 2] / 2;
  }

  UncoreDerivation out;
  out.series.domain = PowerDomain(DomainKind::UncoreDerived);
  out.series.kind = pkg.kind;

  std::size_t j = 0;
  for (const auto& [t, pkg_v] : pkg.points) {
    while (j + 1 < pp0.points.size() &&
           std::llabs(pp0.points[j + 1].first - t) <= std::llabs(pp0.points[j].first - t)) {
      ++j;
    }
    if (std::llabs(pp0.points[j].first - t) > tolerance) {
      ++out.dropped_points;
      continue;
    }
    double diff = pkg_v - pp0.points[j].second;
    if (diff < 0.0) {
      diff = 0.0;
      ++out.clamped_points;
    }
    out.series.points.emplace_back(t, diff);
  }
  if (out.series.empty()) {
    throw Error(ErrorCode::UnalignableSeries,
                "no package/core sample pairs within " + std::to_string(tolerance) + " ns");
  }
  return out;
}

IdleAdjustment subtract_idle(double mean_watts, double idle_watts) {
  if (idle_watts < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "idle watts must be non-negative");
  }
  IdleAdjustment out;
  out.watts = mean_watts - idle_watts;
  if (out.watts < 0.0) {
    out.watts = 0.0;
    out.underflow = true;
  }
  return out;
}

EfficiencyFigures efficiency(double events_per_sec, double mean_watts) {
  if (!(mean_watts > 0.0)) {
    throw Error(ErrorCode::ZeroPower, "mean power must be positive");
  }
  EfficiencyFigures out;
  out.events_per_sec_per_watt = events_per_sec / mean_watts;
  if (events_per_sec > 0.0) out.joules_per_event = mean_watts / events_per_sec;
  return out;
}

PowerStats window_power_stats(const TelemetrySeries& series, TimeWindow window) {
  PowerStats stats;
  stats.domain = series.domain;
  stats.kind = series.kind;
  stats.energy_joules = series.kind == SampleKind::InstantPowerWatts
                            ? integrate_power(series, window)
                            : energy_from_counter(series, window);
  stats.window = clip_to_data(series, window);
  stats.sample_count = points_in(series, stats.window);
  const double seconds = stats.window.seconds();
  stats.mean_watts = seconds > 0.0 ? stats.energy_joules / seconds : 0.0;
  return stats;
}

}  // namespace perfwatt
