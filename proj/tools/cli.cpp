#include "cli.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "perfwatt/config.hpp"
#include "perfwatt/error.hpp"
#include "perfwatt/metrics.hpp"
#include "perfwatt/report.hpp"
#include "perfwatt/sampler.hpp"
#include "perfwatt/sweep.hpp"
#include "perfwatt/telemetry.hpp"
#include "perfwatt/trace.hpp"
#include "perfwatt/workload.hpp"

namespace perfwatt::cli {

namespace {

// Layered configuration: defaults < config file < PERFWATT_* environment
// overrides < command-line flags. Every knob is addressed by a section.key
// name; unknown keys are errors so a typo cannot silently change a run.

struct Settings {
  // [telemetry]
  std::string backend = "synthetic";
  std::optional<std::string> trace;
  std::optional<std::string> package;
  double idle_watts_model = 17.0;
  double watts_per_thread = 5.0;
  double noise_stddev = 0.0;
  std::optional<double> noise_seed;
  // [sampler]
  int interval_ms = 1000;
  // [workload]
  std::optional<std::uint64_t> events;
  std::uint64_t seed = 42;
  std::uint64_t work_scale = 50000;
  unsigned layers = 16;
  // [sweep]
  std::vector<unsigned> threads = {1, 2, 4, 8, 16};
  unsigned repetitions = 1;
  double warmup_s = 5.0;
  std::optional<double> idle_watts;
  PinPolicy pin = PinPolicy::None;
  bool keep_going = false;
  std::string label = "sweep";
  double point_seconds = 60.0;
  // [report]
  std::string out = "./perfwatt-out";
  std::vector<ReportFormat> formats = {ReportFormat::Csv, ReportFormat::Json, ReportFormat::Plotdat};
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& want) {
  throw Error(ErrorCode::InvalidConfig, "bad value '" + value + "' for " + key + " (expected " + want + ")");
}

double to_double(const std::string& key, const std::string& value) {
  const auto v = parse_decimal(value);
  if (!v) bad_value(key, value, "a number");
  return *v;
}

double to_nonneg(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v < 0.0) bad_value(key, value, "a non-negative number");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  const auto v = parse_int64(value);
  if (!v || *v < 0) bad_value(key, value, "a non-negative integer");
  return static_cast<std::uint64_t>(*v);
}

bool to_bool(const std::string& key, const std::string& value) {
  const auto v = parse_bool(value);
  if (!v) bad_value(key, value, "true or false");
  return *v;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "telemetry.backend",   "telemetry.trace",     "telemetry.package",
      "telemetry.idle_watts", "telemetry.watts_per_thread", "telemetry.noise_stddev",
      "telemetry.noise_seed", "sampler.interval_ms", "workload.events",
      "workload.seed",       "workload.work_scale", "workload.layers",
      "sweep.threads",       "sweep.repetitions",   "sweep.warmup_s",
      "sweep.idle_watts",    "sweep.pin",           "sweep.keep_going",
      "sweep.label",         "sweep.point_seconds", "report.out",
      "report.formats",
  };
  return keys;
}

void apply_kv(Settings& s, const std::string& key, const std::string& value) {
  if (key == "telemetry.backend") {
    if (!backend_kind_from_name(value)) bad_value(key, value, "synthetic|replay|rapl-msr|rapl-sysfs");
    s.backend = value;
  } else if (key == "telemetry.trace") {
    s.trace = value;
  } else if (key == "telemetry.package") {
    to_u64(key, value);
    s.package = value;
  } else if (key == "telemetry.idle_watts") {
    s.idle_watts_model = to_nonneg(key, value);
  } else if (key == "telemetry.watts_per_thread") {
    s.watts_per_thread = to_nonneg(key, value);
  } else if (key == "telemetry.noise_stddev") {
    s.noise_stddev = to_nonneg(key, value);
  } else if (key == "telemetry.noise_seed") {
    s.noise_seed = to_nonneg(key, value);
  } else if (key == "sampler.interval_ms") {
    const auto v = parse_int64(value);
    if (!v || *v <= 0) bad_value(key, value, "a positive integer");
    s.interval_ms = static_cast<int>(*v);
  } else if (key == "workload.events") {
    s.events = to_u64(key, value);
  } else if (key == "workload.seed") {
    s.seed = to_u64(key, value);
  } else if (key == "workload.work_scale") {
    s.work_scale = to_u64(key, value);
  } else if (key == "workload.layers") {
    const auto v = to_u64(key, value);
    if (v == 0) bad_value(key, value, "a positive integer");
    s.layers = static_cast<unsigned>(v);
  } else if (key == "sweep.threads") {
    s.threads = parse_thread_list(value);
  } else if (key == "sweep.repetitions") {
    const auto v = to_u64(key, value);
    if (v == 0) bad_value(key, value, "a positive integer");
    s.repetitions = static_cast<unsigned>(v);
  } else if (key == "sweep.warmup_s") {
    s.warmup_s = to_nonneg(key, value);
  } else if (key == "sweep.idle_watts") {
    s.idle_watts = to_nonneg(key, value);
  } else if (key == "sweep.pin") {
    const auto policy = pin_policy_from_name(value);
    if (!policy) bad_value(key, value, "none|compact|scatter");
    s.pin = *policy;
  } else if (key == "sweep.keep_going") {
    s.keep_going = to_bool(key, value);
  } else if (key == "sweep.label") {
    if (value.empty()) bad_value(key, value, "a non-empty label");
    s.label = value;
  } else if (key == "sweep.point_seconds") {
    const double v = to_double(key, value);
    if (v <= 0.0) bad_value(key, value, "a positive number");
    s.point_seconds = v;
  } else if (key == "report.out") {
    s.out = value;
  } else if (key == "report.formats") {
    s.formats = parse_format_list(value);
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown configuration key '" + key + "'");
  }
}

std::string env_name_for(const std::string& key) {
  std::string name = "PERFWATT_";
  for (char c : key) {
    if (c == '.' || c == '-') {
      name.push_back('_');
    } else {
      name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  return name;
}

Settings resolve_settings(const std::string& config_path) {
  Settings s;
  if (!config_path.empty()) {
    for (const auto& [key, value] : load_config_file(config_path)) apply_kv(s, key, value);
  }
  for (const auto& key : known_keys()) {
    if (const char* value = std::getenv(env_name_for(key).c_str())) apply_kv(s, key, value);
  }
  return s;
}

BackendDescriptor make_descriptor(const Settings& s) {
  BackendDescriptor d;
  const auto kind = backend_kind_from_name(s.backend);
  if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown backend '" + s.backend + "'");
  d.kind = *kind;
  switch (d.kind) {
    case BackendKind::Synthetic:
      d.parameters["idle_watts"] = format_decimal(s.idle_watts_model);
      d.parameters["watts_per_thread"] = format_decimal(s.watts_per_thread);
      d.parameters["noise_stddev"] = format_decimal(s.noise_stddev);
      if (s.noise_seed) d.parameters["noise_seed"] = format_decimal(*s.noise_seed);
      break;
    case BackendKind::TraceReplay:
      if (!s.trace) {
        throw Error(ErrorCode::InvalidConfig, "the replay backend needs --trace (or telemetry.trace)");
      }
      d.parameters["path"] = *s.trace;
      break;
    case BackendKind::RaplMsr:
    case BackendKind::RaplSysfs:
      if (s.package) d.parameters["package"] = *s.package;
      break;
  }
  return d;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidDescriptor:
    case ErrorCode::InvalidPlan:
    case ErrorCode::FewerThanTwoSweeps:
      return 1;
    default:
      return 2;
  }
}

// Per-subcommand flag wiring: every value flag maps onto its configuration
// key so precedence and validation stay uniform.
struct FlagBinding {
  CLI::Option* option = nullptr;
  std::string key;
  std::string* storage = nullptr;
};

class FlagSet {
 public:
  void bind(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    storage_.push_back(std::make_unique<std::string>());
    bindings_.push_back(FlagBinding{cmd->add_option(flag, *storage_.back(), help), key,
                                    storage_.back().get()});
  }
  void apply(Settings& s) const {
    for (const auto& b : bindings_) {
      if (b.option->count() > 0) apply_kv(s, b.key, *b.storage);
    }
  }

 private:
  std::vector<FlagBinding> bindings_;
  std::vector<std::unique_ptr<std::string>> storage_;
};

// ---- subcommand bodies ----

void print_probe_backend(std::ostream& out, const std::string& name, const BackendProbe& probe) {
  out << "  " << name << ": " << (probe.available ? "available" : "unavailable");
  if (!probe.detail.empty()) out << " (" << probe.detail << ")";
  out << "\n";
  for (const auto& info : probe.domains) {
    out << "    domain " << info.domain.token() << " via " << info.source << "\n";
  }
}

int cmd_probe(const Settings& s) {
  std::ostream& out = std::cout;
  out << "perfwatt capability report\n";
  out << "  synthetic: available (defaults: idle_watts=" << format_decimal(s.idle_watts_model)
      << ", watts_per_thread=" << format_decimal(s.watts_per_thread) << ")\n";
  if (s.trace) {
    const auto series = read_trace(*s.trace);
    out << "  replay: available (trace " << *s.trace << ")\n";
    for (const auto& sr : series) {
      out << "    domain " << sr.domain.token() << " [" << to_token(sr.kind) << "] rows="
          << sr.points.size() << "\n";
    }
  } else {
    out << "  replay: available (pass --trace to inspect a recording)\n";
  }
  const HostCapabilities caps = probe_host();
  print_probe_backend(out, "rapl-msr", caps.rapl_msr);
  print_probe_backend(out, "rapl-sysfs", caps.rapl_sysfs);
  return 0;
}

int cmd_sample(const Settings& s, double duration_s, const std::string& record, bool to_stdout) {
  auto backend = open_backend(make_descriptor(s));
  SamplingPlan plan;
  plan.interval_ms = s.interval_ms;
  if (!record.empty()) plan.record_path = record;

  SamplingSession session = start_sampling(*backend, plan);
  if (backend->realtime()) {
    std::this_thread::sleep_for(std::chrono::duration<double>(duration_s));
  } else {
    while (!backend->closed()) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  SamplingResult result = stop_sampling(std::move(session));

  std::cerr << "sampled " << result.stats.sample_count << " acquisition(s)";
  if (result.stats.sample_count >= 2) {
    std::cerr << ", mean interval " << format_decimal(result.stats.mean_interval_ms) << " ms";
  }
  if (result.stats.retries) std::cerr << ", retries " << result.stats.retries;
  if (result.stats.skipped_ticks) std::cerr << ", skipped ticks " << result.stats.skipped_ticks;
  if (result.stats.read_failed) std::cerr << ", aborted by read failures";
  std::cerr << "\n";
  for (const auto& series : result.series) {
    std::cerr << "  " << series.domain.token() << " [" << to_token(series.kind) << "] points="
              << series.points.size();
    if (series.size() >= 2) {
      const PowerStats stats =
          window_power_stats(series, TimeWindow{series.front_ns(), series.back_ns()});
      std::cerr << " mean=" << format_decimal(stats.mean_watts)
                << " W energy=" << format_decimal(stats.energy_joules) << " J";
    }
    std::cerr << "\n";
  }
  if (to_stdout) write_trace(std::cout, result.series);
  return 0;
}

nlohmann::ordered_json workload_result_json(const WorkloadResult& r) {
  nlohmann::ordered_json j;
  j["events_done"] = r.events_done;
  j["wall_time_s"] = r.wall_time_s;
  j["events_per_sec"] = r.events_per_sec;
  j["checksum"] = r.checksum;
  j["per_thread_events"] = r.per_thread_events;
  return j;
}

int cmd_bench(const Settings& s, unsigned threads, const std::string& calibrate_target,
              const std::string& out_file, bool to_stdout) {
  if (!calibrate_target.empty()) {
    const auto target = parse_decimal(calibrate_target);
    if (!target) throw Error(ErrorCode::InvalidConfig, "--calibrate expects seconds per event");
    const std::uint64_t scale = calibrate_work_scale(*target);
    std::cout << "work_scale " << scale << "\n";
    return 0;
  }
  if (!s.events) throw Error(ErrorCode::InvalidConfig, "bench needs --events");

  WorkloadSpec spec;
  spec.events = *s.events;
  spec.threads = threads;
  spec.seed = s.seed;
  spec.work_scale = s.work_scale;
  spec.layers = s.layers;
  spec.pin = s.pin;
  const WorkloadResult result = run_workload(spec);

  std::cerr << "events=" << result.events_done << " threads=" << threads << " wall="
            << format_decimal(result.wall_time_s) << " s throughput="
            << format_decimal(result.events_per_sec) << " events/s\n";

  const std::string json = workload_result_json(result).dump(2) + "\n";
  if (!out_file.empty()) {
    std::ofstream out(out_file, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + out_file);
    out << json;
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + out_file);
  }
  if (to_stdout) std::cout << json;
  return 0;
}

SweepConfig sweep_config_from(const Settings& s, bool record) {
  SweepConfig config;
  config.thread_counts = s.threads;
  config.repetitions = s.repetitions;
  config.warmup_s = s.warmup_s;
  config.events_per_point = s.events;
  config.min_point_seconds = s.point_seconds;
  config.backend = make_descriptor(s);
  config.plan.interval_ms = s.interval_ms;
  config.idle_watts = s.idle_watts;
  config.seed = s.seed;
  config.work_scale = s.work_scale;
  config.layers = s.layers;
  config.pin = s.pin;
  config.keep_going = s.keep_going;
  config.label = s.label;
  if (record) config.record_dir = s.out;
  return config;
}

int cmd_sweep(const Settings& s, bool record) {
  const SweepConfig config = sweep_config_from(s, record);
  const SweepReport report = run_sweep(config);

  for (const auto& p : report.points) {
    std::cerr << "point threads=" << p.threads << " rep=" << p.repetition << " eps="
              << format_decimal(p.workload.events_per_sec);
    const auto primary = std::find_if(p.domains.begin(), p.domains.end(), [&](const auto& d) {
      return d.domain == report.primary_domain;
    });
    if (primary != p.domains.end()) {
      std::cerr << " mean_w=" << format_decimal(primary->mean_watts);
    }
    std::cerr << " eff=" << format_decimal(p.efficiency_eps_per_watt) << " eps/W\n";
  }

  const auto written = emit_report_bundle(report, s.formats, s.out);
  for (const auto& path : written) std::cerr << "wrote " << path.string() << "\n";
  if (record) {
    std::cerr << "wrote " << (std::filesystem::path(s.out) / "raw.trace").string() << "\n";
    std::cerr << "wrote " << (std::filesystem::path(s.out) / "workload.json").string() << "\n";
  }
  return 0;
}

int cmd_report(const Settings& s, const std::string& from_trace, const std::string& workload_json,
               const std::vector<std::string>& compare_inputs, const std::string& input_report) {
  const int modes = (!from_trace.empty() ? 1 : 0) + (!compare_inputs.empty() ? 1 : 0) +
                    (!input_report.empty() ? 1 : 0);
  if (modes != 1) {
    throw Error(ErrorCode::InvalidConfig,
                "report needs exactly one of --from TRACE --workload JSON, --compare A B ..., or --input REPORT");
  }
  if (!from_trace.empty()) {
    if (workload_json.empty()) {
      throw Error(ErrorCode::InvalidConfig, "--from needs --workload with the recorded workload.json");
    }
    const SweepReport report = recompute_report(from_trace, workload_json);
    const auto written = emit_report_bundle(report, s.formats, s.out);
    for (const auto& path : written) std::cerr << "wrote " << path.string() << "\n";
    return 0;
  }
  if (!input_report.empty()) {
    const SweepReport report = load_report_json(input_report);
    const auto written = emit_report_bundle(report, s.formats, s.out);
    for (const auto& path : written) std::cerr << "wrote " << path.string() << "\n";
    return 0;
  }
  if (compare_inputs.size() < 2) {
    throw Error(ErrorCode::FewerThanTwoSweeps, "--compare needs at least two report.json files");
  }
  std::vector<SweepReport> sweeps;
  for (const auto& path : compare_inputs) sweeps.push_back(load_report_json(path));
  std::error_code ec;
  std::filesystem::create_directories(s.out, ec);
  const auto dat = std::filesystem::path(s.out) / "cmp_perf_vs_power.dat";
  compare_perf_vs_power(sweeps, dat);
  std::cerr << "wrote " << dat.string() << "\n";
  for (const auto format : s.formats) {
    if (format == ReportFormat::Svg) {
      const auto svg = std::filesystem::path(s.out) / "cmp_perf_vs_power.svg";
      compare_perf_vs_power_svg(sweeps, svg);
      std::cerr << "wrote " << svg.string() << "\n";
    }
  }
  return 0;
}

int cmd_replay(const Settings& s) {
  if (!s.trace) throw Error(ErrorCode::InvalidConfig, "replay needs --trace");
  const auto series = read_trace(*s.trace);
  std::ostream& out = std::cout;
  out << "trace " << *s.trace << "\n";
  const TelemetrySeries* pkg = nullptr;
  const TelemetrySeries* pp0 = nullptr;
  for (const auto& sr : series) {
    out << "  " << sr.domain.token() << " [" << to_token(sr.kind) << "] rows=" << sr.points.size();
    if (sr.size() >= 2) {
      const PowerStats stats = window_power_stats(sr, TimeWindow{sr.front_ns(), sr.back_ns()});
      out << " span=" << format_decimal(stats.window.seconds()) << " s mean="
          << format_decimal(stats.mean_watts) << " W energy=" << format_decimal(stats.energy_joules)
          << " J";
    }
    out << "\n";
    if (sr.domain == PowerDomain(DomainKind::Package)) pkg = &sr;
    if (sr.domain == PowerDomain(DomainKind::CoreSubsystem)) pp0 = &sr;
  }
  if (pkg && pp0 && pkg->size() >= 2) {
    const UncoreDerivation uncore = derive_uncore(*pkg, *pp0);
    out << "  uncore (pkg - pp0) points=" << uncore.series.points.size()
        << " clamped=" << uncore.clamped_points << " dropped=" << uncore.dropped_points;
    if (uncore.series.size() >= 2) {
      const PowerStats stats = window_power_stats(
          uncore.series, TimeWindow{uncore.series.front_ns(), uncore.series.back_ns()});
      out << " mean=" << format_decimal(stats.mean_watts) << " W";
    }
    out << "\n";
  }
  return 0;
}

int cmd_config_dump(const Settings& s) {
  std::ostream& out = std::cout;
  out << "[telemetry]\n";
  out << "backend = " << s.backend << "\n";
  if (s.trace) out << "trace = " << *s.trace << "\n";
  if (s.package) out << "package = " << *s.package << "\n";
  out << "idle_watts = " << format_decimal(s.idle_watts_model) << "\n";
  out << "watts_per_thread = " << format_decimal(s.watts_per_thread) << "\n";
  out << "noise_stddev = " << format_decimal(s.noise_stddev) << "\n";
  out << "[sampler]\n";
  out << "interval_ms = " << s.interval_ms << "\n";
  out << "[workload]\n";
  if (s.events) out << "events = " << *s.events << "\n";
  out << "seed = " << s.seed << "\n";
  out << "work_scale = " << s.work_scale << "\n";
  out << "layers = " << s.layers << "\n";
  out << "[sweep]\n";
  out << "threads = ";
  for (std::size_t i = 0; i < s.threads.size(); ++i) out << (i ? "," : "") << s.threads[i];
  out << "\n";
  out << "repetitions = " << s.repetitions << "\n";
  out << "warmup_s = " << format_decimal(s.warmup_s) << "\n";
  if (s.idle_watts) out << "idle_watts = " << format_decimal(*s.idle_watts) << "\n";
  out << "pin = " << to_string(s.pin) << "\n";
  out << "keep_going = " << (s.keep_going ? "true" : "false") << "\n";
  out << "label = " << s.label << "\n";
  out << "point_seconds = " << format_decimal(s.point_seconds) << "\n";
  out << "[report]\n";
  out << "out = " << s.out << "\n";
  out << "formats = ";
  for (std::size_t i = 0; i < s.formats.size(); ++i) out << (i ? "," : "") << to_string(s.formats[i]);
  out << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"perfwatt: events/sec vs silicon power benchmarking harness"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "configuration file (key = value with [section] headers)")
      ->expected(1);

  // probe
  auto* probe = app.add_subcommand("probe", "report available telemetry backends on this host");
  FlagSet probe_flags;
  probe_flags.bind(probe, "--trace", "telemetry.trace", "trace file to inspect");

  // sample
  auto* sample = app.add_subcommand("sample", "run a standalone sampling session");
  FlagSet sample_flags;
  sample_flags.bind(sample, "--backend", "telemetry.backend", "telemetry backend");
  sample_flags.bind(sample, "--trace", "telemetry.trace", "trace file for the replay backend");
  sample_flags.bind(sample, "--interval-ms", "sampler.interval_ms", "sampling interval");
  double duration_s = 10.0;
  sample->add_option("--duration-s", duration_s, "sampling duration in seconds");
  std::string sample_record;
  sample->add_option("--record", sample_record, "write the raw trace to this path");
  bool sample_stdout = false;
  sample->add_flag("--stdout", sample_stdout, "emit the trace CSV on standard output");

  // bench
  auto* bench = app.add_subcommand("bench", "run the deterministic workload once");
  FlagSet bench_flags;
  bench_flags.bind(bench, "--events", "workload.events", "number of events");
  bench_flags.bind(bench, "--seed", "workload.seed", "workload seed");
  bench_flags.bind(bench, "--work-scale", "workload.work_scale", "arithmetic steps per event");
  bench_flags.bind(bench, "--layers", "workload.layers", "synthetic geometry depth");
  bench_flags.bind(bench, "--pin", "sweep.pin", "thread pinning policy (none|compact|scatter)");
  unsigned bench_threads = 1;
  bench->add_option("--threads", bench_threads, "worker threads")->check(CLI::PositiveNumber);
  std::string calibrate_target;
  bench->add_option("--calibrate", calibrate_target,
                    "find a work_scale hitting this per-event time (seconds) and exit");
  std::string bench_out;
  bench->add_option("--out", bench_out, "write the workload result JSON to this file");
  bool bench_stdout = false;
  bench->add_flag("--stdout", bench_stdout, "emit the workload result JSON on standard output");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "thread-scaling sweep with power sampling");
  FlagSet sweep_flags;
  sweep_flags.bind(sweep, "--backend", "telemetry.backend", "telemetry backend");
  sweep_flags.bind(sweep, "--trace", "telemetry.trace", "trace file for the replay backend");
  sweep_flags.bind(sweep, "--interval-ms", "sampler.interval_ms", "sampling interval");
  sweep_flags.bind(sweep, "--threads", "sweep.threads", "comma list of thread counts");
  sweep_flags.bind(sweep, "--events", "workload.events", "events per point (default: calibrated)");
  sweep_flags.bind(sweep, "--repetitions", "sweep.repetitions", "repetitions per thread count");
  sweep_flags.bind(sweep, "--seed", "workload.seed", "workload seed");
  sweep_flags.bind(sweep, "--work-scale", "workload.work_scale", "arithmetic steps per event");
  sweep_flags.bind(sweep, "--layers", "workload.layers", "synthetic geometry depth");
  sweep_flags.bind(sweep, "--warmup-s", "sweep.warmup_s", "untimed warmup seconds per point");
  sweep_flags.bind(sweep, "--idle-watts", "sweep.idle_watts", "explicit idle power to subtract");
  sweep_flags.bind(sweep, "--pin", "sweep.pin", "thread pinning policy (none|compact|scatter)");
  sweep_flags.bind(sweep, "--label", "sweep.label", "label for reports and comparisons");
  sweep_flags.bind(sweep, "--out", "report.out", "output directory");
  sweep_flags.bind(sweep, "--format", "report.formats", "comma list of csv,json,plotdat,svg");
  bool sweep_record = false;
  sweep->add_flag("--record", sweep_record, "record raw.trace and workload.json into the output directory");
  bool sweep_keep_going = false;
  sweep->add_flag("--keep-going", sweep_keep_going, "continue past failed points");

  // report
  auto* report = app.add_subcommand("report", "regenerate or compare reports from recorded data");
  FlagSet report_flags;
  report_flags.bind(report, "--out", "report.out", "output directory");
  report_flags.bind(report, "--format", "report.formats", "comma list of csv,json,plotdat,svg");
  std::string from_trace;
  report->add_option("--from", from_trace, "recorded raw trace");
  std::string workload_json;
  report->add_option("--workload", workload_json, "workload.json recorded with the trace");
  std::vector<std::string> compare_inputs;
  report->add_option("--compare", compare_inputs, "two or more report.json files to overlay");
  std::string input_report;
  report->add_option("--input", input_report, "existing report.json to re-emit");

  // replay
  auto* replay = app.add_subcommand("replay", "inspect a recorded trace through the metrics pipeline");
  FlagSet replay_flags;
  replay_flags.bind(replay, "--trace", "telemetry.trace", "trace file");

  // config (resolved-settings dump; used to audit precedence)
  auto* config_cmd = app.add_subcommand("config", "print the resolved configuration");
  FlagSet config_flags;
  config_flags.bind(config_cmd, "--backend", "telemetry.backend", "telemetry backend");
  config_flags.bind(config_cmd, "--trace", "telemetry.trace", "trace file");
  config_flags.bind(config_cmd, "--interval-ms", "sampler.interval_ms", "sampling interval");
  config_flags.bind(config_cmd, "--threads", "sweep.threads", "comma list of thread counts");
  config_flags.bind(config_cmd, "--events", "workload.events", "events per point");
  config_flags.bind(config_cmd, "--seed", "workload.seed", "workload seed");
  config_flags.bind(config_cmd, "--work-scale", "workload.work_scale", "steps per event");
  config_flags.bind(config_cmd, "--warmup-s", "sweep.warmup_s", "warmup seconds");
  config_flags.bind(config_cmd, "--idle-watts", "sweep.idle_watts", "idle subtraction");
  config_flags.bind(config_cmd, "--pin", "sweep.pin", "pinning policy");
  config_flags.bind(config_cmd, "--label", "sweep.label", "sweep label");
  config_flags.bind(config_cmd, "--out", "report.out", "output directory");
  config_flags.bind(config_cmd, "--format", "report.formats", "report formats");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error
    return code == 0 ? 0 : 1;
  }

  try {
    Settings settings = resolve_settings(config_path);
    if (probe->parsed()) {
      probe_flags.apply(settings);
      return cmd_probe(settings);
    }
    if (sample->parsed()) {
      sample_flags.apply(settings);
      return cmd_sample(settings, duration_s, sample_record, sample_stdout);
    }
    if (bench->parsed()) {
      bench_flags.apply(settings);
      return cmd_bench(settings, bench_threads, calibrate_target, bench_out, bench_stdout);
    }
    if (sweep->parsed()) {
      sweep_flags.apply(settings);
      if (sweep_keep_going) settings.keep_going = true;
      return cmd_sweep(settings, sweep_record);
    }
    if (report->parsed()) {
      report_flags.apply(settings);
      return cmd_report(settings, from_trace, workload_json, compare_inputs, input_report);
    }
    if (replay->parsed()) {
      replay_flags.apply(settings);
      return cmd_replay(settings);
    }
    if (config_cmd->parsed()) {
      config_flags.apply(settings);
      return cmd_config_dump(settings);
    }
    std::cerr << "perfwatt: no subcommand\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "perfwatt: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "perfwatt: " << e.what() << "\n";
    return 2;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.emplace_back("perfwatt");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const auto& a : full) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace perfwatt::cli
