#include "perfwatt/types.hpp"

#include <array>
#include <charconv>
#include <system_error>

#include "perfwatt/error.hpp"

namespace perfwatt {

namespace {

struct TokenEntry {
  DomainKind kind;
  std::string_view token;
};

constexpr std::array<TokenEntry, 7> kDomainTokens = {{
    {DomainKind::CoreSubsystem, "pp0"},
    {DomainKind::Package, "pkg"},
    {DomainKind::Dram, "dram"},
    {DomainKind::Soc, "soc"},
    {DomainKind::Pmd, "pmd"},
    {DomainKind::WholeCard, "card"},
    {DomainKind::UncoreDerived, "uncore"},
}};

bool valid_custom_label(std::string_view label) {
  if (label.empty() || label.size() > 32) return false;
  for (char c : label) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    if (!ok) return false;
  }
  for (const auto& entry : kDomainTokens) {
    if (label == entry.token) return false;
  }
  return true;
}

}  // namespace

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidDescriptor: return "InvalidDescriptor";
    case ErrorCode::UnsupportedOnHost: return "UnsupportedOnHost";
    case ErrorCode::ReplayFileUnreadable: return "ReplayFileUnreadable";
    case ErrorCode::BackendClosed: return "BackendClosed";
    case ErrorCode::TransientReadFailure: return "TransientReadFailure";
    case ErrorCode::AlreadySampling: return "AlreadySampling";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::ZeroEvents: return "ZeroEvents";
    case ErrorCode::ThreadSpawnFailure: return "ThreadSpawnFailure";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::UnalignableSeries: return "UnalignableSeries";
    case ErrorCode::NonMonotoneCounter: return "NonMonotoneCounter";
    case ErrorCode::EmptyWindowOverlap: return "EmptyWindowOverlap";
    case ErrorCode::ZeroPower: return "ZeroPower";
    case ErrorCode::PointFailed: return "PointFailed";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::EmptySweep: return "EmptySweep";
    case ErrorCode::FewerThanTwoSweeps: return "FewerThanTwoSweeps";
  }
  return "UnknownError";
}

PowerDomain::PowerDomain(DomainKind kind) : kind_(kind) {
  if (kind == DomainKind::Custom) {
    throw Error(ErrorCode::InvalidArgument, "custom domains need a label; use PowerDomain::custom");
  }
}

PowerDomain PowerDomain::custom(std::string label) {
  if (!valid_custom_label(label)) {
    throw Error(ErrorCode::InvalidArgument,
                "invalid custom domain label '" + label + "' (need lowercase [a-z0-9_.-], 1..32 chars)");
  }
  PowerDomain d;
  d.kind_ = DomainKind::Custom;
  d.label_ = std::move(label);
  return d;
}

std::string PowerDomain::token() const {
  if (kind_ == DomainKind::Custom) return label_;
  for (const auto& entry : kDomainTokens) {
    if (entry.kind == kind_) return std::string(entry.token);
  }
  return "unknown";
}

std::optional<PowerDomain> PowerDomain::from_token(std::string_view token) {
  for (const auto& entry : kDomainTokens) {
    if (token == entry.token) return PowerDomain(entry.kind);
  }
  if (valid_custom_label(token)) return PowerDomain::custom(std::string(token));
  return std::nullopt;
}

std::string_view to_token(SampleKind kind) noexcept {
  return kind == SampleKind::EnergyCounterJoules ? "energy_j" : "power_w";
}

std::optional<SampleKind> sample_kind_from_token(std::string_view token) {
  if (token == "energy_j") return SampleKind::EnergyCounterJoules;
  if (token == "power_w") return SampleKind::InstantPowerWatts;
  return std::nullopt;
}

std::string format_decimal(double value) {
  std::array<char, 64> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "0";
  return std::string(buf.data(), ptr);
}

std::optional<double> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_int64(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace perfwatt
