#include <deque>

#include "backends.hpp"
#include "perfwatt/error.hpp"
#include "perfwatt/trace.hpp"

namespace perfwatt::detail {

namespace {

class ReplayBackend final : public TelemetryBackend {
 public:
  explicit ReplayBackend(std::vector<TelemetrySeries> series) {
    for (auto& s : series) {
      domains_.push_back(s.domain);
      kinds_.push_back(s.kind);
      queues_.emplace_back(s.points.begin(), s.points.end());
    }
  }

  bool realtime() const noexcept override { return false; }

  std::vector<SensorSample> read_all() override {
    if (closed()) throw Error(ErrorCode::BackendClosed, "replay backend is closed");
    std::vector<SensorSample> out;
    for (std::size_t i = 0; i < queues_.size(); ++i) {
      if (queues_[i].empty()) continue;
      const auto [t_ns, value] = queues_[i].front();
      queues_[i].pop_front();
      out.push_back(SensorSample{t_ns, domains_[i], kinds_[i], value});
    }
    if (out.empty()) {
      close();
      throw Error(ErrorCode::BackendClosed, "trace exhausted");
    }
    return out;
  }

 private:
  std::vector<SampleKind> kinds_;
  std::vector<std::deque<std::pair<std::int64_t, double>>> queues_;
};

}  // namespace

std::unique_ptr<TelemetryBackend> open_replay(const BackendDescriptor& descriptor) {
  check_parameter_keys(descriptor, {"path"});
  const auto it = descriptor.parameters.find("path");
  if (it == descriptor.parameters.end() || it->second.empty()) {
    throw Error(ErrorCode::InvalidDescriptor, "replay backend needs a 'path' parameter");
  }
  return std::make_unique<ReplayBackend>(read_trace(it->second));
}

}  // namespace perfwatt::detail
