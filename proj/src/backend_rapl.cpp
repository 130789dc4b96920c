#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "backends.hpp"
#include "perfwatt/error.hpp"

namespace perfwatt::detail {

namespace fs = std::filesystem;

namespace {

// Register table for the MSR route. Addresses and the 32-bit counter width
// follow the vendor manual; adding a domain means adding a row.
struct MsrRegister {
  DomainKind domain;
  std::uint32_t address;
  int counter_width_bits;
};

constexpr std::uint32_t kMsrRaplPowerUnit = 0x606;
constexpr MsrRegister kMsrEnergyRegisters[] = {
    {DomainKind::Package, 0x611, 32},
    {DomainKind::CoreSubsystem, 0x639, 32},
    {DomainKind::Dram, 0x619, 32},
};

int parse_package_index(const BackendDescriptor& descriptor) {
  const auto it = descriptor.parameters.find("package");
  if (it == descriptor.parameters.end()) return 0;
  const auto value = parse_int64(it->second);
  if (!value || *value < 0) {
    throw Error(ErrorCode::InvalidDescriptor, "parameter 'package' must be a non-negative integer");
  }
  return static_cast<int>(*value);
}

std::optional<std::string> read_text_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string text;
  std::getline(in, text);
  return text;
}

/// First CPU index belonging to the given physical package; falls back to 0
/// for package 0 when topology is unreadable.
std::optional<int> first_cpu_of_package(int package) {
  const fs::path base = "/sys/devices/system/cpu";
  std::error_code ec;
  for (int cpu = 0; cpu < 4096; ++cpu) {
    const fs::path cpu_dir = base / ("cpu" + std::to_string(cpu));
    if (!fs::exists(cpu_dir, ec)) break;
    const auto pkg_text = read_text_file(cpu_dir / "topology" / "physical_package_id");
    if (!pkg_text) continue;
    const auto pkg = parse_int64(*pkg_text);
    if (pkg && *pkg == package) return cpu;
  }
  if (package == 0) return 0;
  return std::nullopt;
}

class MsrFile {
 public:
  explicit MsrFile(const std::string& path) : path_(path), fd_(::open(path.c_str(), O_RDONLY)) {}
  ~MsrFile() {
    if (fd_ >= 0) ::close(fd_);
  }
  MsrFile(MsrFile&& other) noexcept : path_(std::move(other.path_)), fd_(other.fd_) { other.fd_ = -1; }
  MsrFile(const MsrFile&) = delete;
  MsrFile& operator=(const MsrFile&) = delete;

  bool ok() const noexcept { return fd_ >= 0; }
  int open_errno() const noexcept { return fd_ >= 0 ? 0 : errno; }
  const std::string& path() const noexcept { return path_; }

  std::optional<std::uint64_t> read(std::uint32_t reg) const {
    std::uint64_t value = 0;
    const ssize_t n = ::pread(fd_, &value, sizeof(value), static_cast<off_t>(reg));
    if (n != static_cast<ssize_t>(sizeof(value))) return std::nullopt;
    return value;
  }

 private:
  std::string path_;
  int fd_ = -1;
};

MsrFile open_msr_device(int package) {
  const auto cpu = first_cpu_of_package(package);
  if (!cpu) {
    throw Error(ErrorCode::UnsupportedOnHost,
                "no CPU found for package " + std::to_string(package));
  }
  MsrFile file("/dev/cpu/" + std::to_string(*cpu) + "/msr");
  if (!file.ok()) {
    const int err = file.open_errno();
    std::string hint = err == EACCES || err == EPERM
                           ? "run as root or grant read access to the msr device"
                           : "load the msr kernel module (modprobe msr)";
    throw Error(ErrorCode::UnsupportedOnHost,
                file.path() + ": " + std::strerror(err) + "; " + hint);
  }
  return file;
}

unsigned energy_unit_exponent_from(std::uint64_t power_unit_register) {
  return static_cast<unsigned>((power_unit_register >> 8) & 0x1f);
}

class RaplMsrBackend final : public TelemetryBackend {
 public:
  RaplMsrBackend(MsrFile file, unsigned energy_exponent,
                 std::vector<std::pair<MsrRegister, std::uint64_t>> registers)
      : file_(std::move(file)), energy_exponent_(energy_exponent), registers_(std::move(registers)) {
    ticks_.resize(registers_.size(), 0);
    for (const auto& [reg, baseline] : registers_) domains_.emplace_back(reg.domain);
  }

  std::vector<SensorSample> read_all() override {
    if (closed()) throw Error(ErrorCode::BackendClosed, "rapl-msr backend is closed");
    const std::int64_t stamp = acquisition_stamp();
    std::vector<SensorSample> out;
    out.reserve(registers_.size());
    for (std::size_t i = 0; i < registers_.size(); ++i) {
      auto& [reg, prev_raw] = registers_[i];
      const auto raw = file_.read(reg.address);
      if (!raw) {
        throw Error(ErrorCode::TransientReadFailure,
                    "pread failed on " + file_.path() + " register 0x" + to_hex(reg.address));
      }
      const std::uint64_t masked = *raw & width_mask(reg.counter_width_bits);
      ticks_[i] += (masked - prev_raw) & width_mask(reg.counter_width_bits);
      prev_raw = masked;
      out.push_back(SensorSample{stamp, domains_[i], SampleKind::EnergyCounterJoules,
                                 decode_rapl_energy(ticks_[i], energy_exponent_)});
    }
    return out;
  }

 private:
  static std::uint64_t width_mask(int bits) noexcept {
    return bits >= 64 ? ~0ull : ((1ull << bits) - 1);
  }
  static std::string to_hex(std::uint32_t value) {
    std::ostringstream os;
    os << std::hex << value;
    return os.str();
  }

  MsrFile file_;
  unsigned energy_exponent_;
  std::vector<std::pair<MsrRegister, std::uint64_t>> registers_;  // register + last raw reading
  std::vector<std::uint64_t> ticks_;                              // cumulative since open
};

// ---- powercap route ----

struct PowercapZone {
  fs::path dir;
  PowerDomain domain;
  std::uint64_t max_energy_uj = 0;
};

PowerDomain domain_from_zone_name(const std::string& name) {
  if (name.rfind("package", 0) == 0) return PowerDomain(DomainKind::Package);
  if (name == "core") return PowerDomain(DomainKind::CoreSubsystem);
  if (name == "uncore") return PowerDomain(DomainKind::Soc);
  if (name == "dram") return PowerDomain(DomainKind::Dram);
  std::string label;
  for (char c : name) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
    label.push_back(ok ? c : '-');
  }
  if (label.size() > 32) label.resize(32);
  if (const auto domain = PowerDomain::from_token(label);
      domain && domain->kind() == DomainKind::Custom) {
    return *domain;
  }
  return PowerDomain::custom("zone-" + label.substr(0, 27));
}

std::optional<std::uint64_t> read_u64_file(const fs::path& path) {
  const auto text = read_text_file(path);
  if (!text) return std::nullopt;
  const auto value = parse_int64(*text);
  if (!value || *value < 0) return std::nullopt;
  return static_cast<std::uint64_t>(*value);
}

std::vector<PowercapZone> scan_powercap_zones(int package, std::string& failure_reason) {
  const fs::path base = "/sys/class/powercap";
  std::error_code ec;
  if (!fs::exists(base, ec)) {
    failure_reason = base.string() + " not present; the intel_rapl kernel driver is not loaded";
    return {};
  }
  const std::string parent = "intel-rapl:" + std::to_string(package);
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(base, ec)) {
    const std::string name = entry.path().filename().string();
    if (name == parent || name.rfind(parent + ":", 0) == 0) names.push_back(name);
  }
  if (names.empty()) {
    failure_reason = "no " + parent + " zone under " + base.string();
    return {};
  }
  std::sort(names.begin(), names.end());

  std::vector<PowercapZone> zones;
  for (const auto& name : names) {
    const fs::path dir = base / name;
    const auto zone_name = read_text_file(dir / "name");
    if (!zone_name) continue;
    const auto probe = read_u64_file(dir / "energy_uj");
    if (!probe) {
      failure_reason = (dir / "energy_uj").string() + " unreadable; run as root or adjust permissions";
      return {};
    }
    PowercapZone zone;
    zone.dir = dir;
    zone.domain = domain_from_zone_name(*zone_name);
    zone.max_energy_uj = read_u64_file(dir / "max_energy_range_uj").value_or(0xFFFFFFFFull);
    zones.push_back(std::move(zone));
  }
  if (zones.empty()) failure_reason = "no readable powercap zones for " + parent;
  return zones;
}

class RaplSysfsBackend final : public TelemetryBackend {
 public:
  explicit RaplSysfsBackend(std::vector<PowercapZone> zones) : zones_(std::move(zones)) {
    prev_uj_.reserve(zones_.size());
    cumulative_uj_.assign(zones_.size(), 0);
    for (const auto& zone : zones_) {
      domains_.push_back(zone.domain);
      prev_uj_.push_back(read_u64_file(zone.dir / "energy_uj").value_or(0));
    }
  }

  std::vector<SensorSample> read_all() override {
    if (closed()) throw Error(ErrorCode::BackendClosed, "rapl-sysfs backend is closed");
    const std::int64_t stamp = acquisition_stamp();
    std::vector<SensorSample> out;
    out.reserve(zones_.size());
    for (std::size_t i = 0; i < zones_.size(); ++i) {
      const auto raw = read_u64_file(zones_[i].dir / "energy_uj");
      if (!raw) {
        throw Error(ErrorCode::TransientReadFailure, (zones_[i].dir / "energy_uj").string() + " read failed");
      }
      const std::uint64_t modulus = zones_[i].max_energy_uj + 1;
      const std::uint64_t delta =
          *raw >= prev_uj_[i] ? *raw - prev_uj_[i] : *raw + (modulus - prev_uj_[i]);
      cumulative_uj_[i] += delta;
      prev_uj_[i] = *raw;
      out.push_back(SensorSample{stamp, domains_[i], SampleKind::EnergyCounterJoules,
                                 static_cast<double>(cumulative_uj_[i]) * 1e-6});
    }
    return out;
  }

 private:
  std::vector<PowercapZone> zones_;
  std::vector<std::uint64_t> prev_uj_;
  std::vector<std::uint64_t> cumulative_uj_;
};

}  // namespace

std::unique_ptr<TelemetryBackend> open_rapl_msr(const BackendDescriptor& descriptor) {
  check_parameter_keys(descriptor, {"package"});
  const int package = parse_package_index(descriptor);
  MsrFile file = open_msr_device(package);

  const auto unit_register = file.read(kMsrRaplPowerUnit);
  if (!unit_register) {
    throw Error(ErrorCode::UnsupportedOnHost,
                "cannot read the RAPL power unit register from " + file.path() +
                    "; this CPU does not expose RAPL");
  }
  const unsigned exponent = energy_unit_exponent_from(*unit_register);

  std::vector<std::pair<MsrRegister, std::uint64_t>> registers;
  for (const MsrRegister& reg : kMsrEnergyRegisters) {
    const auto baseline = file.read(reg.address);
    if (!baseline) continue;  // domain not supported on this model
    registers.emplace_back(reg, *baseline & ((1ull << reg.counter_width_bits) - 1));
  }
  if (registers.empty()) {
    throw Error(ErrorCode::UnsupportedOnHost, "no readable RAPL energy registers on " + file.path());
  }
  return std::make_unique<RaplMsrBackend>(std::move(file), exponent, std::move(registers));
}

std::unique_ptr<TelemetryBackend> open_rapl_sysfs(const BackendDescriptor& descriptor) {
  check_parameter_keys(descriptor, {"package"});
  const int package = parse_package_index(descriptor);
  std::string reason;
  auto zones = scan_powercap_zones(package, reason);
  if (zones.empty()) throw Error(ErrorCode::UnsupportedOnHost, reason);
  return std::make_unique<RaplSysfsBackend>(std::move(zones));
}

void probe_rapl_msr(BackendProbe& out) {
  try {
    BackendDescriptor descriptor;
    descriptor.kind = BackendKind::RaplMsr;
    MsrFile file = open_msr_device(0);
    const auto unit_register = file.read(kMsrRaplPowerUnit);
    if (!unit_register) {
      out.available = false;
      out.detail = "MSR device readable but the RAPL power unit register is not";
      return;
    }
    const unsigned exponent = energy_unit_exponent_from(*unit_register);
    out.available = false;
    for (const MsrRegister& reg : kMsrEnergyRegisters) {
      if (file.read(reg.address)) {
        out.available = true;
        std::ostringstream source;
        source << file.path() << " @0x" << std::hex << reg.address;
        out.domains.push_back(RaplDomainInfo{PowerDomain(reg.domain), source.str()});
      }
    }
    if (out.available) {
      out.detail = "energy unit exponent " + std::to_string(exponent) + " (" +
                   format_decimal(decode_rapl_energy(1, exponent)) + " J/tick)";
      if (exponent == 0) {
        out.detail += "; unit register reads 0, implausible for real silicon (virtualized MSRs?)";
      }
    } else {
      out.detail = "no RAPL energy registers readable";
    }
  } catch (const Error& e) {
    out.available = false;
    out.detail = e.what();
  }
}

void probe_rapl_sysfs(BackendProbe& out) {
  std::string reason;
  auto zones = scan_powercap_zones(0, reason);
  if (zones.empty()) {
    out.available = false;
    out.detail = reason;
    return;
  }
  out.available = true;
  out.detail = std::to_string(zones.size()) + " powercap zone(s), microjoule counters";
  for (const auto& zone : zones) {
    out.domains.push_back(RaplDomainInfo{zone.domain, zone.dir.string()});
  }
}

}  // namespace perfwatt::detail
