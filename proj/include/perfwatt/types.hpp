#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace perfwatt {

enum class DomainKind {
  CoreSubsystem,  // RAPL PP0 / X-Gene PMD
  Package,        // RAPL PKG
  Dram,
  Soc,            // uncore subsystem sensor (X-Gene SOC, powercap "uncore")
  Pmd,
  WholeCard,
  UncoreDerived,  // computed as package minus core subsystem, never read from hardware
  Custom,
};

/// A measurement domain. Value type; Custom carries a validated label.
class PowerDomain {
 public:
  PowerDomain() : kind_(DomainKind::Package) {}
  explicit PowerDomain(DomainKind kind);

  /// Label must be non-empty, lowercase [a-z0-9_.-], at most 32 chars,
  /// and must not shadow a reserved trace token.
  static PowerDomain custom(std::string label);

  DomainKind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }

  /// Trace-format token: pp0, pkg, dram, soc, pmd, card, uncore, or the custom label.
  std::string token() const;
  static std::optional<PowerDomain> from_token(std::string_view token);

  friend bool operator==(const PowerDomain&, const PowerDomain&) = default;
  friend auto operator<=>(const PowerDomain&, const PowerDomain&) = default;

 private:
  DomainKind kind_;
  std::string label_;  // only set for Custom
};

enum class SampleKind {
  EnergyCounterJoules,  // cumulative joules since backend open, wrap-corrected
  InstantPowerWatts,
};

std::string_view to_token(SampleKind kind) noexcept;
std::optional<SampleKind> sample_kind_from_token(std::string_view token);

struct SensorSample {
  std::int64_t timestamp_ns = 0;  // monotonic clock
  PowerDomain domain;
  SampleKind kind = SampleKind::InstantPowerWatts;
  double value = 0.0;
};

struct TelemetrySeries {
  PowerDomain domain;
  SampleKind kind = SampleKind::InstantPowerWatts;
  std::vector<std::pair<std::int64_t, double>> points;  // (timestamp_ns, value), strictly increasing

  bool empty() const noexcept { return points.empty(); }
  std::size_t size() const noexcept { return points.size(); }
  std::int64_t front_ns() const { return points.front().first; }
  std::int64_t back_ns() const { return points.back().first; }
};

struct TimeWindow {
  std::int64_t t_start_ns = 0;
  std::int64_t t_end_ns = 0;

  double seconds() const noexcept { return static_cast<double>(t_end_ns - t_start_ns) * 1e-9; }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// Shortest decimal representation that parses back to the identical double.
std::string format_decimal(double value);
/// Strict parse of a full decimal token; nullopt on trailing garbage or empty input.
std::optional<double> parse_decimal(std::string_view text);
std::optional<std::int64_t> parse_int64(std::string_view text);

}  // namespace perfwatt
