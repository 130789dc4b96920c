#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "perfwatt/error.hpp"
#include "perfwatt/telemetry.hpp"
#include "perfwatt/thread_activity.hpp"

using namespace perfwatt;

TEST_CASE("decode_rapl_energy matches the exact power-of-two scaling") {
  // 65536 ticks at 2^-16 J/tick is exactly one joule.
  CHECK(decode_rapl_energy(65536, 16) == 1.0);
  CHECK(decode_rapl_energy(0, 5) == 0.0);
  CHECK(decode_rapl_energy(1, 0) == 1.0);
  CHECK(decode_rapl_energy(3, 1) == 1.5);
  CHECK_THROWS_AS(decode_rapl_energy(1, 32), Error);
}

TEST_CASE("delta_energy handles plain deltas and wraparound") {
  CHECK(delta_energy(100, 612, 32, 16) == 512.0 / 65536.0);  // 0.0078125 J
  CHECK(delta_energy(0xFFFFFF00ull, 0x00000100ull, 32, 16) == 512.0 / 65536.0);
  CHECK(delta_energy(7, 7, 32, 10) == 0.0);
  CHECK(delta_energy(0xFFFFFFFFFFFFFF00ull, 0x10, 64, 0) == 272.0);
  CHECK_THROWS_AS(delta_energy(0, 1, 16, 0), Error);
  CHECK_THROWS_AS(delta_energy(0x1FFFFFFFFull, 0, 32, 0), Error);
}

TEST_CASE("accumulated deltas reproduce a wide-integer counter exactly") {
  // Property from the spec: sum of wrap-corrected deltas equals the true
  // (unbounded) counter total, with zero tolerance.
  std::mt19937_64 rng(12345);
  for (int round = 0; round < 200; ++round) {
    const unsigned exponent = static_cast<unsigned>(rng() % 32);
    std::uint64_t truth = rng() % (1ull << 32);
    std::uint64_t prev = truth & 0xFFFFFFFFull;
    std::uint64_t total_ticks = 0;
    double accumulated = 0.0;
    for (int step = 0; step < 64; ++step) {
      const std::uint64_t increment = rng() % (1ull << 27);
      truth += increment;
      total_ticks += increment;
      const std::uint64_t raw = truth & 0xFFFFFFFFull;
      accumulated += delta_energy(prev, raw, 32, exponent);
      prev = raw;
    }
    CHECK(accumulated == decode_rapl_energy(total_ticks, exponent));
  }
}

TEST_CASE("synthetic backend follows the affine model") {
  auto backend = open_backend(synthetic_descriptor());
  REQUIRE(backend->domains().size() == 1);
  CHECK(backend->domains().front() == PowerDomain(DomainKind::Package));

  auto idle = backend->read_all();
  REQUIRE(idle.size() == 1);
  CHECK(idle.front().value == 17.0);
  CHECK(idle.front().kind == SampleKind::InstantPowerWatts);

  {
    WorkerRegistration registration(4);
    auto busy = backend->read_all();
    CHECK(busy.front().value == 37.0);  // 17 + 4 × 5
  }
  CHECK(backend->read_all().front().value == 17.0);

  // Advertised domains never change over the handle's lifetime.
  CHECK(backend->domains().front() == PowerDomain(DomainKind::Package));

  backend->close();
  CHECK_THROWS_AS(backend->read_all(), Error);
}

TEST_CASE("synthetic timestamps strictly increase") {
  auto backend = open_backend(synthetic_descriptor());
  std::int64_t last = 0;
  for (int i = 0; i < 100; ++i) {
    const auto samples = backend->read_all();
    CHECK(samples.front().timestamp_ns > last);
    last = samples.front().timestamp_ns;
  }
}

TEST_CASE("descriptor validation") {
  BackendDescriptor missing;
  missing.kind = BackendKind::Synthetic;
  missing.parameters = {{"idle_watts", "17"}};
  CHECK_THROWS_AS(open_backend(missing), Error);

  BackendDescriptor negative;
  negative.kind = BackendKind::Synthetic;
  negative.parameters = {{"idle_watts", "-1"}, {"watts_per_thread", "5"}};
  CHECK_THROWS_AS(open_backend(negative), Error);

  BackendDescriptor typo = synthetic_descriptor();
  typo.parameters["idle_wats"] = "17";
  CHECK_THROWS_AS(open_backend(typo), Error);

  BackendDescriptor replay;
  replay.kind = BackendKind::TraceReplay;
  CHECK_THROWS_AS(open_backend(replay), Error);

  replay.parameters["path"] = "/nonexistent/trace.csv";
  try {
    open_backend(replay);
    FAIL("expected ReplayFileUnreadable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ReplayFileUnreadable);
  }
}

TEST_CASE("replay backend yields recorded samples then closes") {
  const char* path = "replay_unit.trace";
  {
    std::ofstream out(path);
    out << "t_ns,domain,kind,value\n";
    for (int i = 0; i < 10; ++i) {
      out << (1000 + i * 100) << ",pkg,power_w," << (90 + i) << "\n";
      out << (1000 + i * 100) << ",pp0,power_w," << (70 + i) << "\n";
    }
  }
  BackendDescriptor descriptor;
  descriptor.kind = BackendKind::TraceReplay;
  descriptor.parameters["path"] = path;
  auto backend = open_backend(descriptor);
  REQUIRE(backend->domains().size() == 2);
  CHECK_FALSE(backend->realtime());

  int reads = 0;
  while (true) {
    try {
      const auto samples = backend->read_all();
      REQUIRE(samples.size() == 2);
      CHECK(samples[0].domain == PowerDomain(DomainKind::Package));
      CHECK(samples[0].value == 90 + reads);
      ++reads;
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BackendClosed);
      break;
    }
  }
  CHECK(reads == 10);
  std::remove(path);
}

TEST_CASE("rapl backends degrade to UnsupportedOnHost without hardware") {
  // On hosts without RAPL devices the open must fail with a remediation
  // hint rather than crash; with hardware it must advertise domains.
  for (BackendKind kind : {BackendKind::RaplMsr, BackendKind::RaplSysfs}) {
    BackendDescriptor descriptor;
    descriptor.kind = kind;
    try {
      auto backend = open_backend(descriptor);
      CHECK(!backend->domains().empty());
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnsupportedOnHost);
      CHECK(std::string(e.what()).size() > 20);  // carries a reason
    }
  }
}

TEST_CASE("probe_host never throws") {
  const HostCapabilities caps = probe_host();
  CHECK(!caps.rapl_msr.detail.empty());
  CHECK(!caps.rapl_sysfs.detail.empty());
}
