#pragma once

namespace perfwatt {

// Process-wide count of busy workload workers. The workload registers its
// workers here; the synthetic telemetry backend reads the count to drive its
// affine power model.

int active_worker_count() noexcept;
void register_workers(int n) noexcept;
void unregister_workers(int n) noexcept;

class WorkerRegistration {
 public:
  explicit WorkerRegistration(int n) : n_(n) { register_workers(n_); }
  ~WorkerRegistration() { unregister_workers(n_); }
  WorkerRegistration(const WorkerRegistration&) = delete;
  WorkerRegistration& operator=(const WorkerRegistration&) = delete;

 private:
  int n_;
};

}  // namespace perfwatt
