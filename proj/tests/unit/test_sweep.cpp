#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "perfwatt/error.hpp"
#include "perfwatt/report.hpp"
#include "perfwatt/sweep.hpp"

using namespace perfwatt;

namespace {

SweepConfig quick_synthetic_config() {
  // Points must span many sampling intervals: interpolation across the power
  // step at the window edges costs up to (slope*threads/2)*interval joules
  // per edge, so ~1 s points at a 10 ms interval keep it well under 1%.
  SweepConfig config;
  config.thread_counts = {1, 2};
  config.warmup_s = 0.05;
  config.events_per_point = 1200;
  config.work_scale = 30'000;
  config.layers = 8;
  config.plan.interval_ms = 10;
  config.backend = synthetic_descriptor();
  config.label = "unit";
  return config;
}

}  // namespace

TEST_CASE("config validation") {
  SweepConfig config = quick_synthetic_config();
  config.thread_counts = {};
  CHECK_THROWS_AS(run_sweep(config), Error);
  config.thread_counts = {2, 2};
  CHECK_THROWS_AS(run_sweep(config), Error);
  config.thread_counts = {4, 2};
  CHECK_THROWS_AS(run_sweep(config), Error);
  config = quick_synthetic_config();
  config.repetitions = 0;
  CHECK_THROWS_AS(run_sweep(config), Error);
  config = quick_synthetic_config();
  config.plan.interval_ms = 5;
  CHECK_THROWS_AS(run_sweep(config), Error);
}

TEST_CASE("synthetic sweep matches the affine power model") {
  // Zero-noise model: window-mean power must land on idle + slope×threads
  // within 1%; the only deviation source is edge interpolation around the
  // workload start, bounded well below 1% at these point lengths.
  SweepConfig config = quick_synthetic_config();
  const SweepReport report = run_sweep(config);

  REQUIRE(report.points.size() == 2);
  CHECK(report.primary_domain == PowerDomain(DomainKind::Package));
  for (const auto& point : report.points) {
    const double model = 17.0 + 5.0 * point.threads;
    REQUIRE(point.domains.size() == 1);
    const double mean = point.domains.front().mean_watts;
    CHECK(std::fabs(mean - model) <= 0.01 * model);
    CHECK(point.workload.events_done == 1200);
    CHECK(point.sampling.sample_count >= 2);
    // Efficiency ties throughput to the primary-domain mean.
    CHECK(point.efficiency_eps_per_watt ==
          doctest::Approx(point.workload.events_per_sec / mean).epsilon(1e-12));
    REQUIRE(point.joules_per_event.has_value());
    CHECK(*point.joules_per_event ==
          doctest::Approx(mean / point.workload.events_per_sec).epsilon(1e-12));
  }

  // Points preserve the configured thread order.
  CHECK(report.points[0].threads == 1);
  CHECK(report.points[1].threads == 2);

  // Metadata captured.
  CHECK(!report.metadata.os.empty());
  CHECK(!report.metadata.wall_clock_start.empty());

  // A real sweep report survives the JSON round trip unchanged.
  CHECK(parse_report_json(report_to_json(report)) == report);
}

TEST_CASE("idle subtraction is explicit and flagged in the report") {
  SweepConfig config = quick_synthetic_config();
  config.thread_counts = {1};
  config.idle_watts = 17.0;
  const SweepReport report = run_sweep(config);
  REQUIRE(report.points.size() == 1);
  const auto& point = report.points.front();
  // Raw mean stays raw; efficiency divides by (22 - 17) = 5 W.
  CHECK(point.domains.front().mean_watts == doctest::Approx(22.0).epsilon(0.01));
  CHECK(point.efficiency_eps_per_watt ==
        doctest::Approx(point.workload.events_per_sec / (point.domains.front().mean_watts - 17.0))
            .epsilon(1e-9));
  CHECK_FALSE(point.idle_underflow);
}

TEST_CASE("repetitions produce one point each, in order, and repeat within 10%") {
  SweepConfig config = quick_synthetic_config();
  config.thread_counts = {1, 2};
  config.repetitions = 2;
  const SweepReport report = run_sweep(config);
  REQUIRE(report.points.size() == 4);
  CHECK(report.points[0].threads == 1);
  CHECK(report.points[0].repetition == 0);
  CHECK(report.points[1].threads == 1);
  CHECK(report.points[1].repetition == 1);
  CHECK(report.points[2].threads == 2);
  CHECK(report.points[3].repetition == 1);

  // Points are reported individually, never silently averaged; pairs at
  // equal thread counts land within the workload's timing repeatability.
  for (std::size_t i = 0; i + 1 < report.points.size(); i += 2) {
    const double a = report.points[i].workload.events_per_sec;
    const double b = report.points[i + 1].workload.events_per_sec;
    CHECK(std::fabs(a - b) <= 0.10 * std::max(a, b));
  }
}

TEST_CASE("a failed point aborts the sweep unless keep_going") {
  const char* path = "sweep_keepgoing.trace";
  {
    std::ofstream out(path);
    out << "t_ns,domain,kind,value\n0,pkg,power_w,37\n1000,pkg,power_w,37\n";
  }
  SweepConfig config = quick_synthetic_config();
  config.warmup_s = 0.0;
  config.events_per_point = 30;
  config.work_scale = 200;
  config.backend.kind = BackendKind::TraceReplay;
  config.backend.parameters = {{"path", path}};

  try {
    run_sweep(config);
    FAIL("expected PointFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PointFailed);
  }

  config.keep_going = true;
  const SweepReport report = run_sweep(config);  // every point skipped
  CHECK(report.points.empty());
  std::remove(path);
}

TEST_CASE("run_point over a replay backend reproduces the recorded power") {
  // A trace whose timestamps bracket the live workload run: constant 37 W,
  // so the windowed mean must be exactly 37 whatever the window.
  const char* path = "sweep_replay.trace";
  const auto now = std::chrono::duration_cast<std::chrono::nanoseconds>(
                       std::chrono::steady_clock::now().time_since_epoch())
                       .count();
  {
    std::ofstream out(path);
    out << "t_ns,domain,kind,value\n";
    for (int i = 0; i < 400; ++i) {
      out << (now - 1'000'000'000ll + i * 500'000'000ll) << ",pkg,power_w,37\n";
    }
  }
  BackendDescriptor descriptor;
  descriptor.kind = BackendKind::TraceReplay;
  descriptor.parameters["path"] = path;
  auto backend = open_backend(descriptor);

  SweepConfig config = quick_synthetic_config();
  config.warmup_s = 0.0;
  const SweepPoint point = run_point(*backend, 4, 0, config, 400);
  CHECK(point.domains.front().mean_watts == doctest::Approx(37.0).epsilon(1e-9));
  std::remove(path);
}

TEST_CASE("point failures carry the thread count") {
  // A replay trace far in the past cannot overlap the live workload window.
  const char* path = "sweep_stale.trace";
  {
    std::ofstream out(path);
    out << "t_ns,domain,kind,value\n0,pkg,power_w,37\n1000,pkg,power_w,37\n";
  }
  BackendDescriptor descriptor;
  descriptor.kind = BackendKind::TraceReplay;
  descriptor.parameters["path"] = path;
  auto backend = open_backend(descriptor);

  SweepConfig config = quick_synthetic_config();
  config.warmup_s = 0.0;
  config.events_per_point = 50;
  try {
    run_point(*backend, 3, 0, config, 50);
    FAIL("expected PointFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PointFailed);
    CHECK(std::string(e.what()).find("threads=3") != std::string::npos);
  }
  std::remove(path);
}

TEST_CASE("recording writes raw.trace and workload.json") {
  SweepConfig config = quick_synthetic_config();
  config.thread_counts = {1};
  config.events_per_point = 200;
  config.record_dir = "sweep_record_dir";
  const SweepReport report = run_sweep(config);
  CHECK(report.points.size() == 1);
  CHECK(std::filesystem::exists("sweep_record_dir/raw.trace"));
  CHECK(std::filesystem::exists("sweep_record_dir/workload.json"));
  std::filesystem::remove_all("sweep_record_dir");
}

TEST_CASE("calibrated sizing resolves events and work scale") {
  SweepConfig config = quick_synthetic_config();
  config.thread_counts = {1};
  config.events_per_point.reset();
  config.calibration_target_s = 0.0005;
  config.min_point_seconds = 0.5;
  const SweepReport report = run_sweep(config);
  REQUIRE(report.config.events_per_point.has_value());
  CHECK(*report.config.events_per_point == 1000);  // 0.5 s / 0.5 ms
  CHECK(report.config.work_scale > 0);
  REQUIRE(report.points.size() == 1);
  CHECK(report.points.front().workload.events_done == 1000);
}
