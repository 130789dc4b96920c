#pragma once

#include <cstdint>
#include <optional>

#include "perfwatt/types.hpp"

namespace perfwatt {

// Pure functions over telemetry series: same inputs, bit-identical outputs.

/// Trapezoidal energy over the window, linearly interpolated at the window
/// edges and clipped to the data range. Needs an instantaneous-power series
/// with at least 2 points; throws KindMismatch, TooFewPoints, or
/// EmptyWindowOverlap when the (clipped) window is inverted.
double integrate_power(const TelemetrySeries& series, TimeWindow window);

/// Counter value at window end minus value at window start, edges linearly
/// interpolated and clipped to the data range. The series must be cumulative
/// joules; a decreasing value means a wrap-handling bug upstream and raises
/// NonMonotoneCounter.
double energy_from_counter(const TelemetrySeries& series, TimeWindow window);

struct UncoreDerivation {
  TelemetrySeries series;  // domain UncoreDerived, same kind as the inputs
  int clamped_points = 0;  // package minus core went negative and was clamped to 0
  int dropped_points = 0;  // package points with no core point within tolerance
};

/// Pointwise package minus core subsystem, paired by nearest timestamp.
/// Tolerance defaults to half the package series' median sampling interval.
/// Throws KindMismatch or UnalignableSeries (no pair at all).
UncoreDerivation derive_uncore(const TelemetrySeries& pkg, const TelemetrySeries& pp0,
                               std::optional<std::int64_t> pairing_tolerance_ns = std::nullopt);

struct IdleAdjustment {
  double watts = 0.0;
  bool underflow = false;  // idle exceeded the measured mean; clamped to 0
};

/// max(mean - idle, 0). Callers record the application in report metadata;
/// it is never applied implicitly.
IdleAdjustment subtract_idle(double mean_watts, double idle_watts);

struct EfficiencyFigures {
  double events_per_sec_per_watt = 0.0;
  std::optional<double> joules_per_event;  // absent when throughput is zero
};

/// events/sec per watt plus the inverse figure. Throws ZeroPower for a
/// non-positive mean.
EfficiencyFigures efficiency(double events_per_sec, double mean_watts);

struct PowerStats {
  PowerDomain domain;
  SampleKind kind = SampleKind::InstantPowerWatts;
  TimeWindow window;  // the effective (clipped) window the stats cover
  double energy_joules = 0.0;
  double mean_watts = 0.0;
  std::int64_t sample_count = 0;  // series points inside the effective window
};

/// Windowed energy and mean power for either series kind. Mean power is
/// energy over the clipped window divided by its length, not a sample mean.
PowerStats window_power_stats(const TelemetrySeries& series, TimeWindow window);

}  // namespace perfwatt
