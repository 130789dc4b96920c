#include "perfwatt/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "perfwatt/error.hpp"
#include "perfwatt/metrics.hpp"
#include "perfwatt/trace.hpp"

namespace perfwatt {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void bad_json(const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, "malformed report JSON: " + what);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  return out;
}

void finish_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

// ---- JSON building blocks ----

ordered_json domain_json(const PowerDomain& domain) { return domain.token(); }

PowerDomain domain_from_json(const ordered_json& j) {
  const auto domain = PowerDomain::from_token(j.get<std::string>());
  if (!domain) bad_json("bad domain token '" + j.get<std::string>() + "'");
  return *domain;
}

ordered_json config_json(const SweepConfig& config) {
  ordered_json j;
  j["thread_counts"] = config.thread_counts;
  j["repetitions"] = config.repetitions;
  j["warmup_s"] = config.warmup_s;
  if (config.events_per_point) {
    j["events_per_point"] = *config.events_per_point;
  } else {
    j["events_per_point"] = nullptr;
  }
  j["calibration_target_s"] = config.calibration_target_s;
  j["min_point_seconds"] = config.min_point_seconds;
  j["backend"] = ordered_json{{"kind", std::string(to_string(config.backend.kind))},
                              {"parameters", config.backend.parameters}};
  ordered_json plan;
  plan["interval_ms"] = config.plan.interval_ms;
  ordered_json domains = ordered_json::array();
  for (const auto& d : config.plan.domains) domains.push_back(domain_json(d));
  plan["domains"] = domains;
  j["plan"] = plan;
  j["idle_watts"] = config.idle_watts ? ordered_json(*config.idle_watts) : ordered_json(nullptr);
  j["seed"] = config.seed;
  j["work_scale"] = config.work_scale;
  j["layers"] = config.layers;
  j["pin"] = std::string(to_string(config.pin));
  j["keep_going"] = config.keep_going;
  j["label"] = config.label;
  return j;
}

SweepConfig config_from_json(const ordered_json& j) {
  SweepConfig config;
  config.thread_counts = j.at("thread_counts").get<std::vector<unsigned>>();
  config.repetitions = j.at("repetitions").get<unsigned>();
  config.warmup_s = j.at("warmup_s").get<double>();
  if (!j.at("events_per_point").is_null()) {
    config.events_per_point = j.at("events_per_point").get<std::uint64_t>();
  }
  config.calibration_target_s = j.at("calibration_target_s").get<double>();
  config.min_point_seconds = j.at("min_point_seconds").get<double>();
  const auto& backend = j.at("backend");
  const auto kind = backend_kind_from_name(backend.at("kind").get<std::string>());
  if (!kind) bad_json("bad backend kind");
  config.backend.kind = *kind;
  config.backend.parameters = backend.at("parameters").get<std::map<std::string, std::string>>();
  const auto& plan = j.at("plan");
  config.plan.interval_ms = plan.at("interval_ms").get<int>();
  config.plan.domains.clear();
  for (const auto& d : plan.at("domains")) config.plan.domains.push_back(domain_from_json(d));
  if (!j.at("idle_watts").is_null()) config.idle_watts = j.at("idle_watts").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  config.work_scale = j.at("work_scale").get<std::uint64_t>();
  config.layers = j.at("layers").get<unsigned>();
  const auto pin = pin_policy_from_name(j.at("pin").get<std::string>());
  if (!pin) bad_json("bad pin policy");
  config.pin = *pin;
  config.keep_going = j.at("keep_going").get<bool>();
  config.label = j.at("label").get<std::string>();
  return config;
}

ordered_json metadata_json(const HostMetadata& meta) {
  return ordered_json{{"os", meta.os},
                      {"cpu_model", meta.cpu_model},
                      {"hostname", meta.hostname},
                      {"wall_clock_start", meta.wall_clock_start}};
}

HostMetadata metadata_from_json(const ordered_json& j) {
  HostMetadata meta;
  meta.os = j.at("os").get<std::string>();
  meta.cpu_model = j.at("cpu_model").get<std::string>();
  meta.hostname = j.at("hostname").get<std::string>();
  meta.wall_clock_start = j.at("wall_clock_start").get<std::string>();
  return meta;
}

ordered_json workload_json(const WorkloadResult& w) {
  ordered_json j;
  j["events_done"] = w.events_done;
  j["wall_time_s"] = w.wall_time_s;
  j["events_per_sec"] = w.events_per_sec;
  j["checksum"] = w.checksum;
  j["per_thread_events"] = w.per_thread_events;
  j["t_start_ns"] = w.t_start_ns;
  j["t_end_ns"] = w.t_end_ns;
  return j;
}

WorkloadResult workload_from_json(const ordered_json& j) {
  WorkloadResult w;
  w.events_done = j.at("events_done").get<std::uint64_t>();
  w.wall_time_s = j.at("wall_time_s").get<double>();
  w.events_per_sec = j.at("events_per_sec").get<double>();
  w.checksum = j.at("checksum").get<std::uint64_t>();
  w.per_thread_events = j.at("per_thread_events").get<std::vector<std::uint64_t>>();
  w.t_start_ns = j.at("t_start_ns").get<std::int64_t>();
  w.t_end_ns = j.at("t_end_ns").get<std::int64_t>();
  return w;
}

ordered_json sampling_json(const SessionStats& s) {
  ordered_json j;
  j["sample_count"] = s.sample_count;
  j["mean_interval_ms"] = s.mean_interval_ms;
  j["max_interval_ms"] = s.max_interval_ms;
  j["stddev_interval_ms"] = s.stddev_interval_ms;
  j["retries"] = s.retries;
  j["skipped_ticks"] = s.skipped_ticks;
  j["read_failed"] = s.read_failed;
  j["backend_exhausted"] = s.backend_exhausted;
  return j;
}

SessionStats sampling_from_json(const ordered_json& j) {
  SessionStats s;
  s.sample_count = j.at("sample_count").get<std::int64_t>();
  s.mean_interval_ms = j.at("mean_interval_ms").get<double>();
  s.max_interval_ms = j.at("max_interval_ms").get<double>();
  s.stddev_interval_ms = j.at("stddev_interval_ms").get<double>();
  s.retries = j.at("retries").get<int>();
  s.skipped_ticks = j.at("skipped_ticks").get<int>();
  s.read_failed = j.at("read_failed").get<bool>();
  s.backend_exhausted = j.at("backend_exhausted").get<bool>();
  return s;
}

ordered_json window_json(const TimeWindow& w) {
  return ordered_json{{"start_ns", w.t_start_ns}, {"end_ns", w.t_end_ns}};
}

TimeWindow window_from_json(const ordered_json& j) {
  return TimeWindow{j.at("start_ns").get<std::int64_t>(), j.at("end_ns").get<std::int64_t>()};
}

ordered_json point_json(const SweepPoint& p) {
  ordered_json j;
  j["threads"] = p.threads;
  j["repetition"] = p.repetition;
  j["window"] = window_json(p.window);
  j["workload"] = workload_json(p.workload);
  ordered_json domains = ordered_json::array();
  for (const auto& d : p.domains) {
    domains.push_back(ordered_json{{"domain", domain_json(d.domain)},
                                   {"kind", std::string(to_token(d.kind))},
                                   {"mean_watts", d.mean_watts},
                                   {"energy_joules", d.energy_joules},
                                   {"sample_count", d.sample_count}});
  }
  j["domains"] = domains;
  j["efficiency_eps_per_watt"] = p.efficiency_eps_per_watt;
  j["joules_per_event"] = p.joules_per_event ? ordered_json(*p.joules_per_event) : ordered_json(nullptr);
  j["idle_underflow"] = p.idle_underflow;
  j["sampling"] = sampling_json(p.sampling);
  return j;
}

SweepPoint point_from_json(const ordered_json& j) {
  SweepPoint p;
  p.threads = j.at("threads").get<unsigned>();
  p.repetition = j.at("repetition").get<unsigned>();
  p.window = window_from_json(j.at("window"));
  p.workload = workload_from_json(j.at("workload"));
  for (const auto& d : j.at("domains")) {
    DomainWindowStats stats;
    stats.domain = domain_from_json(d.at("domain"));
    const auto kind = sample_kind_from_token(d.at("kind").get<std::string>());
    if (!kind) bad_json("bad sample kind");
    stats.kind = *kind;
    stats.mean_watts = d.at("mean_watts").get<double>();
    stats.energy_joules = d.at("energy_joules").get<double>();
    stats.sample_count = d.at("sample_count").get<std::int64_t>();
    p.domains.push_back(stats);
  }
  p.efficiency_eps_per_watt = j.at("efficiency_eps_per_watt").get<double>();
  if (!j.at("joules_per_event").is_null()) p.joules_per_event = j.at("joules_per_event").get<double>();
  p.idle_underflow = j.at("idle_underflow").get<bool>();
  p.sampling = sampling_from_json(j.at("sampling"));
  return p;
}

// ---- figure datasets ----

struct XyPoint {
  double x;
  double y;
};

std::vector<XyPoint> perf_vs_power_points(const SweepReport& report) {
  std::vector<XyPoint> points;
  for (const auto& p : report.points) {
    const auto primary = std::find_if(p.domains.begin(), p.domains.end(),
                                      [&](const auto& d) { return d.domain == report.primary_domain; });
    if (primary == p.domains.end()) continue;
    points.push_back(XyPoint{primary->mean_watts, p.workload.events_per_sec});
  }
  return points;
}

std::vector<std::string> dedup_labels(const std::vector<SweepReport>& sweeps) {
  std::vector<std::string> labels;
  std::map<std::string, int> seen;
  for (const auto& sweep : sweeps) {
    const int n = ++seen[sweep.label];
    labels.push_back(n == 1 ? sweep.label : sweep.label + "-" + std::to_string(n));
  }
  return labels;
}

// ---- minimal deterministic SVG charts ----

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

struct SvgSeries {
  std::string label;
  std::vector<XyPoint> points;
};

std::string svg_num(double v) {
  // Two decimals are plenty for pixel coordinates and keep files compact.
  const double rounded = std::round(v * 100.0) / 100.0;
  std::string s = format_decimal(rounded);
  return s;
}

void write_xy_chart(std::ostream& out, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<SvgSeries>& series, bool bars) {
  constexpr double width = 800, height = 500;
  constexpr double left = 80, right = 770, top = 50, bottom = 440;

  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      if (first) {
        x_min = x_max = p.x;
        y_min = y_max = p.y;
        first = false;
      }
      x_min = std::min(x_min, p.x);
      x_max = std::max(x_max, p.x);
      y_min = std::min(y_min, p.y);
      y_max = std::max(y_max, p.y);
    }
  }
  y_min = std::min(y_min, 0.0);
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;

  const auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (right - left); };
  const auto sy = [&](double y) { return bottom - (y - y_min) / (y_max - y_min) * (bottom - top); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"18\">"
      << title << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\"" << bottom
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
      << "\" stroke=\"black\"/>\n";
  out << "<text x=\"425\" y=\"480\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << x_label << "</text>\n";
  out << "<text x=\"22\" y=\"245\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 22 245)\">"
      << y_label << "</text>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    const double fx = x_min + (x_max - x_min) * tick / 4.0;
    const double fy = y_min + (y_max - y_min) * tick / 4.0;
    out << "<text x=\"" << svg_num(sx(fx)) << "\" y=\"458\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"11\">" << format_decimal(std::round(fx * 100) / 100)
        << "</text>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << svg_num(sy(fy) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << format_decimal(std::round(fy * 100) / 100) << "</text>\n";
  }

  std::size_t color_index = 0;
  for (const auto& s : series) {
    const char* color = kPalette[color_index % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (bars) {
      const double slot = (right - left) / static_cast<double>(std::max<std::size_t>(1, s.points.size()));
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        const double bar_w = slot * 0.6;
        const double x0 = left + slot * static_cast<double>(i) + slot * 0.2;
        out << "<rect x=\"" << svg_num(x0) << "\" y=\"" << svg_num(sy(s.points[i].y)) << "\" width=\""
            << svg_num(bar_w) << "\" height=\"" << svg_num(bottom - sy(s.points[i].y)) << "\" fill=\""
            << color << "\"/>\n";
      }
    } else {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        if (i) out << ' ';
        out << svg_num(sx(s.points[i].x)) << ',' << svg_num(sy(s.points[i].y));
      }
      out << "\"/>\n";
      for (const auto& p : s.points) {
        out << "<circle cx=\"" << svg_num(sx(p.x)) << "\" cy=\"" << svg_num(sy(p.y))
            << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
      }
    }
    if (series.size() > 1) {
      out << "<text x=\"" << right - 160 << "\" y=\"" << top + 18 * static_cast<double>(color_index)
          << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << color << "\">" << s.label
          << "</text>\n";
    }
    ++color_index;
  }
  out << "</svg>\n";
}

}  // namespace

std::string_view to_string(ReportFormat format) noexcept {
  switch (format) {
    case ReportFormat::Csv: return "csv";
    case ReportFormat::Json: return "json";
    case ReportFormat::Plotdat: return "plotdat";
    case ReportFormat::Svg: return "svg";
  }
  return "csv";
}

std::vector<ReportFormat> parse_format_list(std::string_view text) {
  std::vector<ReportFormat> formats;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view token = text.substr(start, comma - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (token == "csv") {
      formats.push_back(ReportFormat::Csv);
    } else if (token == "json") {
      formats.push_back(ReportFormat::Json);
    } else if (token == "plotdat") {
      formats.push_back(ReportFormat::Plotdat);
    } else if (token == "svg") {
      formats.push_back(ReportFormat::Svg);
    } else if (!token.empty()) {
      throw Error(ErrorCode::InvalidConfig, "unknown report format '" + std::string(token) + "'");
    }
    start = comma + 1;
  }
  if (formats.empty()) throw Error(ErrorCode::InvalidConfig, "empty format list");
  return formats;
}

std::string_view figure_name(FigureKind kind) noexcept {
  switch (kind) {
    case FigureKind::AbsPerf: return "abs_perf";
    case FigureKind::EffScaling: return "eff_scaling";
    case FigureKind::PerfVsPower: return "perf_vs_power";
  }
  return "abs_perf";
}

void emit_csv(const SweepReport& report, std::ostream& out) {
  out << "threads,events,wall_s,eps,domain,mean_w,energy_j,eps_per_w,j_per_event\n";
  for (const auto& p : report.points) {
    for (const auto& d : p.domains) {
      out << p.threads << ',' << p.workload.events_done << ',' << format_decimal(p.workload.wall_time_s)
          << ',' << format_decimal(p.workload.events_per_sec) << ',' << d.domain.token() << ','
          << format_decimal(d.mean_watts) << ',' << format_decimal(d.energy_joules) << ',';
      if (d.domain == report.primary_domain) {
        out << format_decimal(p.efficiency_eps_per_watt) << ',';
        if (p.joules_per_event) out << format_decimal(*p.joules_per_event);
      } else if (d.mean_watts > 0.0) {
        out << format_decimal(p.workload.events_per_sec / d.mean_watts) << ',';
        if (p.workload.events_per_sec > 0.0) {
          out << format_decimal(d.mean_watts / p.workload.events_per_sec);
        }
      } else {
        out << ',';
      }
      out << '\n';
    }
  }
}

void emit_csv(const SweepReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  emit_csv(report, out);
  finish_out(out, path);
}

std::string report_to_json(const SweepReport& report) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "perfwatt-report";
  j["label"] = report.label;
  j["power_metric"] = "window_mean";
  j["primary_domain"] = domain_json(report.primary_domain);
  j["idle_watts"] =
      report.config.idle_watts ? ordered_json(*report.config.idle_watts) : ordered_json(nullptr);
  j["metadata"] = metadata_json(report.metadata);
  j["config"] = config_json(report.config);
  ordered_json points = ordered_json::array();
  for (const auto& p : report.points) points.push_back(point_json(p));
  j["points"] = points;
  return j.dump(2) + "\n";
}

void emit_json(const SweepReport& report, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << report_to_json(report);
  finish_out(out, path);
}

SweepReport parse_report_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    bad_json(e.what());
  }
  try {
    if (j.at("kind").get<std::string>() != "perfwatt-report") bad_json("not a perfwatt report");
    if (j.at("schema_version").get<int>() != kSchemaVersion) bad_json("unsupported schema version");
    SweepReport report;
    report.label = j.at("label").get<std::string>();
    report.primary_domain = domain_from_json(j.at("primary_domain"));
    report.metadata = metadata_from_json(j.at("metadata"));
    report.config = config_from_json(j.at("config"));
    for (const auto& p : j.at("points")) report.points.push_back(point_from_json(p));
    return report;
  } catch (const nlohmann::json::exception& e) {
    bad_json(e.what());
  }
}

SweepReport load_report_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_report_json(buffer.str());
}

void emit_figure_data(const SweepReport& report, FigureKind figure, std::ostream& out) {
  if (report.points.empty()) throw Error(ErrorCode::EmptySweep, "sweep has no points");
  out << "# perfwatt figure: " << figure_name(figure) << "\n";
  switch (figure) {
    case FigureKind::AbsPerf: {
      out << "# columns: label max_events_per_sec\n";
      double best = 0.0;
      for (const auto& p : report.points) best = std::max(best, p.workload.events_per_sec);
      out << '"' << report.label << "\" " << format_decimal(best) << '\n';
      break;
    }
    case FigureKind::EffScaling: {
      out << "# columns: threads events_per_sec_per_watt\n";
      for (const auto& p : report.points) {
        out << p.threads << ' ' << format_decimal(p.efficiency_eps_per_watt) << '\n';
      }
      break;
    }
    case FigureKind::PerfVsPower: {
      out << "# columns: mean_watts events_per_sec\n";
      for (const auto& p : perf_vs_power_points(report)) {
        out << format_decimal(p.x) << ' ' << format_decimal(p.y) << '\n';
      }
      break;
    }
  }
}

void emit_figure_data(const SweepReport& report, FigureKind figure, const std::filesystem::path& path) {
  auto out = open_out(path);
  emit_figure_data(report, figure, out);
  finish_out(out, path);
}

void emit_figure_svg(const SweepReport& report, FigureKind figure, const std::filesystem::path& path) {
  if (report.points.empty()) throw Error(ErrorCode::EmptySweep, "sweep has no points");
  auto out = open_out(path);
  switch (figure) {
    case FigureKind::AbsPerf: {
      double best = 0.0;
      for (const auto& p : report.points) best = std::max(best, p.workload.events_per_sec);
      write_xy_chart(out, "Absolute performance", report.label, "events/s",
                     {SvgSeries{report.label, {XyPoint{0.0, best}}}}, /*bars=*/true);
      break;
    }
    case FigureKind::EffScaling: {
      SvgSeries series{report.label, {}};
      for (const auto& p : report.points) {
        series.points.push_back(XyPoint{static_cast<double>(p.threads), p.efficiency_eps_per_watt});
      }
      write_xy_chart(out, "Energy efficiency scaling", "threads", "events/s per W", {series},
                     /*bars=*/false);
      break;
    }
    case FigureKind::PerfVsPower: {
      write_xy_chart(out, "Performance over power", "mean W", "events/s",
                     {SvgSeries{report.label, perf_vs_power_points(report)}}, /*bars=*/false);
      break;
    }
  }
  finish_out(out, path);
}

void compare_perf_vs_power(const std::vector<SweepReport>& sweeps, std::ostream& out) {
  if (sweeps.size() < 2) {
    throw Error(ErrorCode::FewerThanTwoSweeps, "compare needs at least two sweeps");
  }
  const auto labels = dedup_labels(sweeps);
  out << "# perfwatt figure: compare_perf_vs_power\n";
  out << "# columns: mean_watts events_per_sec\n";
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    if (i) out << '\n';
    out << "# series: " << labels[i] << '\n';
    for (const auto& p : perf_vs_power_points(sweeps[i])) {
      out << format_decimal(p.x) << ' ' << format_decimal(p.y) << '\n';
    }
  }
}

void compare_perf_vs_power(const std::vector<SweepReport>& sweeps, const std::filesystem::path& path) {
  auto out = open_out(path);
  compare_perf_vs_power(sweeps, out);
  finish_out(out, path);
}

void compare_perf_vs_power_svg(const std::vector<SweepReport>& sweeps,
                               const std::filesystem::path& path) {
  if (sweeps.size() < 2) {
    throw Error(ErrorCode::FewerThanTwoSweeps, "compare needs at least two sweeps");
  }
  const auto labels = dedup_labels(sweeps);
  std::vector<SvgSeries> series;
  for (std::size_t i = 0; i < sweeps.size(); ++i) {
    series.push_back(SvgSeries{labels[i], perf_vs_power_points(sweeps[i])});
  }
  auto out = open_out(path);
  write_xy_chart(out, "Performance over power", "mean W", "events/s", series, /*bars=*/false);
  finish_out(out, path);
}

std::vector<std::filesystem::path> emit_report_bundle(const SweepReport& report,
                                                      const std::vector<ReportFormat>& formats,
                                                      const std::filesystem::path& output_dir) {
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  std::vector<std::filesystem::path> written;
  const auto want = [&](ReportFormat f) {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
  };
  if (want(ReportFormat::Csv)) {
    const auto path = output_dir / "report.csv";
    emit_csv(report, path);
    written.push_back(path);
  }
  if (want(ReportFormat::Json)) {
    const auto path = output_dir / "report.json";
    emit_json(report, path);
    written.push_back(path);
  }
  if (want(ReportFormat::Plotdat)) {
    for (const FigureKind figure :
         {FigureKind::AbsPerf, FigureKind::EffScaling, FigureKind::PerfVsPower}) {
      const auto path = output_dir / ("fig_" + std::string(figure_name(figure)) + ".dat");
      emit_figure_data(report, figure, path);
      written.push_back(path);
    }
  }
  if (want(ReportFormat::Svg)) {
    for (const FigureKind figure :
         {FigureKind::AbsPerf, FigureKind::EffScaling, FigureKind::PerfVsPower}) {
      const auto path = output_dir / ("fig_" + std::string(figure_name(figure)) + ".svg");
      emit_figure_svg(report, figure, path);
      written.push_back(path);
    }
  }
  return written;
}

void write_workload_json(const std::filesystem::path& path, const SweepReport& report) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "perfwatt-workload-record";
  j["label"] = report.label;
  j["primary_domain"] = domain_json(report.primary_domain);
  j["metadata"] = metadata_json(report.metadata);
  j["config"] = config_json(report.config);
  ordered_json points = ordered_json::array();
  for (const auto& p : report.points) {
    ordered_json pj;
    pj["threads"] = p.threads;
    pj["repetition"] = p.repetition;
    pj["window"] = window_json(p.window);
    pj["workload"] = workload_json(p.workload);
    pj["sampling"] = sampling_json(p.sampling);
    points.push_back(pj);
  }
  j["points"] = points;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
  finish_out(out, path);
}

SweepReport recompute_report(const std::filesystem::path& trace_path,
                             const std::filesystem::path& workload_json_path) {
  std::ifstream in(workload_json_path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + workload_json_path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();

  ordered_json j;
  try {
    j = ordered_json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    bad_json(e.what());
  }

  SweepReport report;
  try {
    if (j.at("kind").get<std::string>() != "perfwatt-workload-record") {
      bad_json("not a perfwatt workload record");
    }
    if (j.at("schema_version").get<int>() != kSchemaVersion) bad_json("unsupported schema version");
    report.label = j.at("label").get<std::string>();
    report.primary_domain = domain_from_json(j.at("primary_domain"));
    report.metadata = metadata_from_json(j.at("metadata"));
    report.config = config_from_json(j.at("config"));

    const auto series = read_trace(trace_path);
    for (const auto& pj : j.at("points")) {
      SweepPoint point;
      point.threads = pj.at("threads").get<unsigned>();
      point.repetition = pj.at("repetition").get<unsigned>();
      point.window = window_from_json(pj.at("window"));
      point.workload = workload_from_json(pj.at("workload"));
      point.sampling = sampling_from_json(pj.at("sampling"));

      for (const auto& s : series) {
        const PowerStats stats = window_power_stats(s, point.window);
        point.domains.push_back(DomainWindowStats{s.domain, s.kind, stats.mean_watts,
                                                  stats.energy_joules, stats.sample_count});
      }
      const auto primary = std::find_if(point.domains.begin(), point.domains.end(),
                                        [&](const auto& d) { return d.domain == report.primary_domain; });
      if (primary == point.domains.end()) bad_json("primary domain missing from the trace");
      double watts = primary->mean_watts;
      if (report.config.idle_watts) {
        const IdleAdjustment adjusted = subtract_idle(watts, *report.config.idle_watts);
        watts = adjusted.watts;
        point.idle_underflow = adjusted.underflow;
      }
      if (watts > 0.0) {
        const EfficiencyFigures figures = efficiency(point.workload.events_per_sec, watts);
        point.efficiency_eps_per_watt = figures.events_per_sec_per_watt;
        point.joules_per_event = figures.joules_per_event;
      }
      report.points.push_back(std::move(point));
    }
  } catch (const nlohmann::json::exception& e) {
    bad_json(e.what());
  }
  return report;
}

}  // namespace perfwatt
