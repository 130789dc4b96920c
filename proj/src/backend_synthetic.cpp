#include <random>

#include "backends.hpp"
#include "perfwatt/error.hpp"
#include "perfwatt/thread_activity.hpp"

namespace perfwatt::detail {

namespace {

// Affine model: idle + slope × active workers, plus optional Gaussian noise.
// Mirrors the near-linear power growth real packages show under thread scaling.
class SyntheticBackend final : public TelemetryBackend {
 public:
  SyntheticBackend(double idle_watts, double watts_per_thread, double noise_stddev,
                   std::uint64_t noise_seed)
      : idle_watts_(idle_watts),
        watts_per_thread_(watts_per_thread),
        noise_stddev_(noise_stddev),
        rng_(noise_seed),
        noise_(0.0, noise_stddev > 0.0 ? noise_stddev : 1.0) {
    domains_ = {PowerDomain(DomainKind::Package)};
  }

  std::vector<SensorSample> read_all() override {
    if (closed()) throw Error(ErrorCode::BackendClosed, "synthetic backend is closed");
    double watts = idle_watts_ + watts_per_thread_ * static_cast<double>(active_worker_count());
    if (noise_stddev_ > 0.0) watts += noise_(rng_);
    if (watts < 0.0) watts = 0.0;
    return {SensorSample{acquisition_stamp(), domains_.front(), SampleKind::InstantPowerWatts, watts}};
  }

 private:
  double idle_watts_;
  double watts_per_thread_;
  double noise_stddev_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_;
};

}  // namespace

std::unique_ptr<TelemetryBackend> open_synthetic(const BackendDescriptor& descriptor) {
  check_parameter_keys(descriptor, {"idle_watts", "watts_per_thread", "noise_stddev", "noise_seed"});
  const double idle = required_nonneg_param(descriptor, "idle_watts");
  const double slope = required_nonneg_param(descriptor, "watts_per_thread");
  const double noise = optional_nonneg_param(descriptor, "noise_stddev", 0.0);
  const double seed = optional_nonneg_param(descriptor, "noise_seed", 1.0);
  return std::make_unique<SyntheticBackend>(idle, slope, noise, static_cast<std::uint64_t>(seed));
}

}  // namespace perfwatt::detail
