#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "perfwatt/error.hpp"
#include "perfwatt/report.hpp"

using namespace perfwatt;

namespace {

SweepReport sample_report() {
  SweepReport report;
  report.label = "fixture";
  report.primary_domain = PowerDomain(DomainKind::Package);
  report.metadata = {"Linux test", "Imaginary CPU @ 2.0GHz", "testhost", "2014-09-01T12:00:00Z"};
  report.config.thread_counts = {1, 2, 4, 8};
  report.config.events_per_point = 1000;
  report.config.label = "fixture";
  report.config.plan.interval_ms = 1000;

  double watts = 22.0;
  double eps = 450.0;
  std::int64_t t = 1'000'000'000;
  for (unsigned threads : report.config.thread_counts) {
    SweepPoint point;
    point.threads = threads;
    point.repetition = 0;
    point.workload.events_done = 1000;
    point.workload.wall_time_s = 1000.0 / eps;
    point.workload.events_per_sec = eps;
    point.workload.checksum = 0x1234567890abcdefull ^ threads;
    point.workload.per_thread_events.assign(threads, 1000 / threads);
    point.workload.t_start_ns = t;
    point.workload.t_end_ns = t + 2'000'000'000;
    point.window = TimeWindow{t, t + 2'000'000'000};
    point.domains.push_back(DomainWindowStats{PowerDomain(DomainKind::Package),
                                              SampleKind::InstantPowerWatts, watts, watts * 2.0, 3});
    point.domains.push_back(DomainWindowStats{PowerDomain(DomainKind::CoreSubsystem),
                                              SampleKind::InstantPowerWatts, watts - 9.0,
                                              (watts - 9.0) * 2.0, 3});
    point.efficiency_eps_per_watt = eps / watts;
    point.joules_per_event = watts / eps;
    point.sampling.sample_count = 3;
    point.sampling.mean_interval_ms = 1000.0;
    report.points.push_back(point);
    watts += 5.0;
    eps *= 1.8;
    t += 5'000'000'000;
  }
  return report;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("csv layout: header plus one row per point and domain") {
  const SweepReport report = sample_report();
  std::ostringstream out;
  emit_csv(report, out);
  const std::string text = out.str();

  std::size_t lines = 0;
  for (char c : text) lines += (c == '\n');
  CHECK(lines == 1 + report.points.size() * 2);  // 2 domains per point
  CHECK(text.rfind("threads,events,wall_s,eps,domain,mean_w,energy_j,eps_per_w,j_per_event\n", 0) ==
        0);
}

TEST_CASE("csv values parse back exactly") {
  const SweepReport report = sample_report();
  std::ostringstream out;
  emit_csv(report, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);  // header
  std::getline(in, line);  // first point, primary domain row
  std::stringstream row(line);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(row, field, ',')) fields.push_back(field);
  REQUIRE(fields.size() == 9);
  CHECK(*parse_decimal(fields[2]) == report.points[0].workload.wall_time_s);
  CHECK(*parse_decimal(fields[3]) == report.points[0].workload.events_per_sec);
  CHECK(fields[4] == "pkg");
  CHECK(*parse_decimal(fields[5]) == report.points[0].domains[0].mean_watts);
  CHECK(*parse_decimal(fields[7]) == report.points[0].efficiency_eps_per_watt);
  CHECK(*parse_decimal(fields[8]) == *report.points[0].joules_per_event);
}

TEST_CASE("json round-trips to an equal report") {
  const SweepReport report = sample_report();
  const std::string json = report_to_json(report);
  const SweepReport parsed = parse_report_json(json);
  CHECK(parsed == report);
  // And the re-emission is byte-identical.
  CHECK(report_to_json(parsed) == json);
}

TEST_CASE("emission is deterministic") {
  const SweepReport report = sample_report();
  std::ostringstream a;
  std::ostringstream b;
  emit_csv(report, a);
  emit_csv(report, b);
  CHECK(a.str() == b.str());

  std::ostringstream fa;
  std::ostringstream fb;
  emit_figure_data(report, FigureKind::PerfVsPower, fa);
  emit_figure_data(report, FigureKind::PerfVsPower, fb);
  CHECK(fa.str() == fb.str());
}

TEST_CASE("figure datasets") {
  const SweepReport report = sample_report();

  std::ostringstream abs_perf;
  emit_figure_data(report, FigureKind::AbsPerf, abs_perf);
  // One data row for a single sweep.
  CHECK(abs_perf.str().find("\"fixture\" ") != std::string::npos);

  std::ostringstream eff;
  emit_figure_data(report, FigureKind::EffScaling, eff);
  CHECK(eff.str().find("\n1 ") != std::string::npos);
  CHECK(eff.str().find("\n8 ") != std::string::npos);

  std::ostringstream pvp;
  emit_figure_data(report, FigureKind::PerfVsPower, pvp);
  // Watts strictly increase with threads in the fixture.
  std::istringstream in(pvp.str());
  std::string line;
  double prev_w = -1.0;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream cols(line);
    double w = 0.0;
    double eps_v = 0.0;
    cols >> w >> eps_v;
    CHECK(w > prev_w);
    prev_w = w;
    ++rows;
  }
  CHECK(rows == 4);

  SweepReport empty = report;
  empty.points.clear();
  CHECK_THROWS_AS(emit_figure_data(empty, FigureKind::AbsPerf, pvp), Error);
}

TEST_CASE("svg emission is deterministic") {
  const SweepReport report = sample_report();
  const std::filesystem::path a = "svg_det_a.svg";
  const std::filesystem::path b = "svg_det_b.svg";
  emit_figure_svg(report, FigureKind::PerfVsPower, a);
  emit_figure_svg(report, FigureKind::PerfVsPower, b);
  CHECK(slurp(a) == slurp(b));
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("report bundle writes the requested formats") {
  const SweepReport report = sample_report();
  const std::filesystem::path dir = "report_bundle_dir";
  const auto written = emit_report_bundle(
      report, {ReportFormat::Csv, ReportFormat::Json, ReportFormat::Plotdat, ReportFormat::Svg}, dir);
  CHECK(written.size() == 2 + 3 + 3);
  CHECK(std::filesystem::exists(dir / "report.csv"));
  CHECK(std::filesystem::exists(dir / "report.json"));
  CHECK(std::filesystem::exists(dir / "fig_abs_perf.dat"));
  CHECK(std::filesystem::exists(dir / "fig_eff_scaling.svg"));
  const std::string svg = slurp(dir / "fig_perf_vs_power.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unwritable path raises IoFailure") {
  const SweepReport report = sample_report();
  try {
    emit_csv(report, "/nonexistent-dir/report.csv");
    FAIL("expected IoFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoFailure);
  }
}

TEST_CASE("compare overlays labeled series and deduplicates labels") {
  SweepReport a = sample_report();
  SweepReport b = sample_report();
  b.points[0].domains[0].mean_watts = 12.0;  // different silicon, different curve

  std::ostringstream out;
  compare_perf_vs_power({a, b}, out);
  const std::string text = out.str();
  CHECK(text.find("# series: fixture\n") != std::string::npos);
  CHECK(text.find("# series: fixture-2\n") != std::string::npos);

  // Rows per series match the point counts.
  int data_rows = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') ++data_rows;
  }
  CHECK(data_rows == 8);

  CHECK_THROWS_AS(compare_perf_vs_power({a}, out), Error);
}

TEST_CASE("workload sidecar and recompute round-trip") {
  // recompute_report is exercised end-to-end (with a real trace) in the CLI
  // tests and the acceptance suite; here only the sidecar schema.
  const SweepReport report = sample_report();
  const std::filesystem::path path = "workload_sidecar.json";
  write_workload_json(path, report);
  const std::string text = slurp(path);
  CHECK(text.find("\"kind\": \"perfwatt-workload-record\"") != std::string::npos);
  CHECK(text.find("\"schema_version\": 1") != std::string::npos);
  std::filesystem::remove(path);
}
