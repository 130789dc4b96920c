#pragma once

#include <memory>

#include "perfwatt/telemetry.hpp"

namespace perfwatt::detail {

std::unique_ptr<TelemetryBackend> open_synthetic(const BackendDescriptor& descriptor);
std::unique_ptr<TelemetryBackend> open_replay(const BackendDescriptor& descriptor);
std::unique_ptr<TelemetryBackend> open_rapl_msr(const BackendDescriptor& descriptor);
std::unique_ptr<TelemetryBackend> open_rapl_sysfs(const BackendDescriptor& descriptor);

void probe_rapl_msr(BackendProbe& out);
void probe_rapl_sysfs(BackendProbe& out);

/// Rejects unrecognized parameter keys so a typo cannot silently change an
/// experiment.
void check_parameter_keys(const BackendDescriptor& descriptor,
                          std::initializer_list<const char*> allowed);

double required_nonneg_param(const BackendDescriptor& descriptor, const char* key);
double optional_nonneg_param(const BackendDescriptor& descriptor, const char* key, double fallback);

}  // namespace perfwatt::detail
