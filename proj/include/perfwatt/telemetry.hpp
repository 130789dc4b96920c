#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "perfwatt/types.hpp"

namespace perfwatt {

enum class BackendKind { RaplMsr, RaplSysfs, TraceReplay, Synthetic };

std::string_view to_string(BackendKind kind) noexcept;
/// Accepts rapl-msr, rapl-sysfs, replay, synthetic.
std::optional<BackendKind> backend_kind_from_name(std::string_view name);

struct BackendDescriptor {
  BackendKind kind = BackendKind::Synthetic;
  std::map<std::string, std::string> parameters;

  friend bool operator==(const BackendDescriptor&, const BackendDescriptor&) = default;
  // Recognized keys:
  //   synthetic:  idle_watts (required), watts_per_thread (required),
  //               noise_stddev, noise_seed
  //   replay:     path (required)
  //   rapl-msr:   package
  //   rapl-sysfs: package
};

/// Fills in the synthetic defaults (17 W idle, 5 W/thread, no noise) used
/// throughout the CLI when a parameter is not given explicitly.
BackendDescriptor synthetic_descriptor(std::map<std::string, std::string> overrides = {});

/// One opened telemetry source. The advertised domain list is fixed for the
/// lifetime of the handle. A handle may move between threads but only one
/// sampling session may drive it at a time.
class TelemetryBackend {
 public:
  virtual ~TelemetryBackend() = default;

  const std::vector<PowerDomain>& domains() const noexcept { return domains_; }

  /// One sample per advertised domain, all carrying one acquisition
  /// timestamp (replay returns the recorded stamps instead). Energy-counter
  /// domains report cumulative joules since open, wrap-corrected.
  /// Throws BackendClosed or TransientReadFailure.
  virtual std::vector<SensorSample> read_all() = 0;

  /// False for replay: the sampler drains such a backend without pacing.
  virtual bool realtime() const noexcept { return true; }

  virtual void close() noexcept { closed_.store(true); }
  bool closed() const noexcept { return closed_.load(); }

  bool try_acquire_sampler() noexcept {
    bool expected = false;
    return sampler_busy_.compare_exchange_strong(expected, true);
  }
  void release_sampler() noexcept { sampler_busy_.store(false); }

 protected:
  /// Monotonic now, bumped to stay strictly increasing per handle.
  std::int64_t acquisition_stamp();

  std::vector<PowerDomain> domains_;
  std::atomic<bool> closed_{false};

 private:
  std::atomic<bool> sampler_busy_{false};
  std::int64_t last_stamp_ns_ = 0;
};

/// Validates the descriptor and opens the selected source.
/// Throws InvalidDescriptor, ReplayFileUnreadable, or UnsupportedOnHost
/// (the latter with a remediation hint).
std::unique_ptr<TelemetryBackend> open_backend(const BackendDescriptor& descriptor);

/// raw × 2^-energy_unit_exponent joules. Exponent must be in [0, 31].
double decode_rapl_energy(std::uint64_t raw, unsigned energy_unit_exponent);

/// ((curr - prev) mod 2^width) × 2^-exponent joules; correct across at most
/// one counter wrap. width is 32 or 64.
double delta_energy(std::uint64_t prev_raw, std::uint64_t curr_raw, int counter_width_bits,
                    unsigned energy_unit_exponent);

// Capability probing for the CLI `probe` subcommand. Never throws; failures
// come back as unavailable-with-reason.
struct RaplDomainInfo {
  PowerDomain domain;
  std::string source;  // MSR address or powercap zone path
};
struct BackendProbe {
  bool available = false;
  std::string detail;  // reason when unavailable; unit constants etc. when available
  std::vector<RaplDomainInfo> domains;
};
struct HostCapabilities {
  BackendProbe rapl_msr;
  BackendProbe rapl_sysfs;
};
HostCapabilities probe_host();

}  // namespace perfwatt
