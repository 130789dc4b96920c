#include "perfwatt/telemetry.hpp"

#include <chrono>
#include <cmath>

#include "backends.hpp"
#include "perfwatt/error.hpp"

namespace perfwatt {

std::string_view to_string(BackendKind kind) noexcept {
  switch (kind) {
    case BackendKind::RaplMsr: return "rapl-msr";
    case BackendKind::RaplSysfs: return "rapl-sysfs";
    case BackendKind::TraceReplay: return "replay";
    case BackendKind::Synthetic: return "synthetic";
  }
  return "unknown";
}

std::optional<BackendKind> backend_kind_from_name(std::string_view name) {
  if (name == "rapl-msr") return BackendKind::RaplMsr;
  if (name == "rapl-sysfs") return BackendKind::RaplSysfs;
  if (name == "replay") return BackendKind::TraceReplay;
  if (name == "synthetic") return BackendKind::Synthetic;
  return std::nullopt;
}

BackendDescriptor synthetic_descriptor(std::map<std::string, std::string> overrides) {
  BackendDescriptor d;
  d.kind = BackendKind::Synthetic;
  d.parameters = {{"idle_watts", "17"}, {"watts_per_thread", "5"}, {"noise_stddev", "0"}};
  for (auto& [key, value] : overrides) d.parameters[key] = value;
  return d;
}

std::int64_t TelemetryBackend::acquisition_stamp() {
  const auto now = std::chrono::steady_clock::now().time_since_epoch();
  std::int64_t ns = std::chrono::duration_cast<std::chrono::nanoseconds>(now).count();
  if (ns <= last_stamp_ns_) ns = last_stamp_ns_ + 1;
  last_stamp_ns_ = ns;
  return ns;
}

std::unique_ptr<TelemetryBackend> open_backend(const BackendDescriptor& descriptor) {
  switch (descriptor.kind) {
    case BackendKind::Synthetic: return detail::open_synthetic(descriptor);
    case BackendKind::TraceReplay: return detail::open_replay(descriptor);
    case BackendKind::RaplMsr: return detail::open_rapl_msr(descriptor);
    case BackendKind::RaplSysfs: return detail::open_rapl_sysfs(descriptor);
  }
  throw Error(ErrorCode::InvalidDescriptor, "unknown backend kind");
}

double decode_rapl_energy(std::uint64_t raw, unsigned energy_unit_exponent) {
  if (energy_unit_exponent > 31) {
    throw Error(ErrorCode::InvalidArgument, "energy unit exponent must be in [0, 31]");
  }
  return std::ldexp(static_cast<double>(raw), -static_cast<int>(energy_unit_exponent));
}

double delta_energy(std::uint64_t prev_raw, std::uint64_t curr_raw, int counter_width_bits,
                    unsigned energy_unit_exponent) {
  if (counter_width_bits != 32 && counter_width_bits != 64) {
    throw Error(ErrorCode::InvalidArgument, "counter width must be 32 or 64 bits");
  }
  std::uint64_t delta = curr_raw - prev_raw;  // mod 2^64
  if (counter_width_bits == 32) {
    if (prev_raw > 0xFFFFFFFFull || curr_raw > 0xFFFFFFFFull) {
      throw Error(ErrorCode::InvalidArgument, "raw value exceeds 32-bit counter width");
    }
    delta &= 0xFFFFFFFFull;
  }
  return decode_rapl_energy(delta, energy_unit_exponent);
}

HostCapabilities probe_host() {
  HostCapabilities caps;
  detail::probe_rapl_msr(caps.rapl_msr);
  detail::probe_rapl_sysfs(caps.rapl_sysfs);
  return caps;
}

namespace detail {

void check_parameter_keys(const BackendDescriptor& descriptor,
                          std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : descriptor.parameters) {
    bool known = false;
    for (const char* a : allowed) {
      if (key == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw Error(ErrorCode::InvalidDescriptor,
                  "unknown parameter '" + key + "' for backend " + std::string(to_string(descriptor.kind)));
    }
  }
}

double required_nonneg_param(const BackendDescriptor& descriptor, const char* key) {
  const auto it = descriptor.parameters.find(key);
  if (it == descriptor.parameters.end()) {
    throw Error(ErrorCode::InvalidDescriptor, std::string("missing required parameter '") + key + "'");
  }
  const auto value = parse_decimal(it->second);
  if (!value || *value < 0.0 || !std::isfinite(*value)) {
    throw Error(ErrorCode::InvalidDescriptor,
                std::string("parameter '") + key + "' must be a non-negative number, got '" + it->second + "'");
  }
  return *value;
}

double optional_nonneg_param(const BackendDescriptor& descriptor, const char* key, double fallback) {
  if (descriptor.parameters.find(key) == descriptor.parameters.end()) return fallback;
  return required_nonneg_param(descriptor, key);
}

}  // namespace detail

}  // namespace perfwatt
