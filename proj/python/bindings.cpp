#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "perfwatt/error.hpp"
#include "perfwatt/metrics.hpp"
#include "perfwatt/report.hpp"
#include "perfwatt/sweep.hpp"
#include "perfwatt/telemetry.hpp"
#include "perfwatt/thread_activity.hpp"
#include "perfwatt/trace.hpp"
#include "perfwatt/workload.hpp"

namespace py = pybind11;
using namespace perfwatt;

namespace {

using Points = std::vector<std::pair<std::int64_t, double>>;

TelemetrySeries make_series(const Points& points, SampleKind kind, PowerDomain domain) {
  TelemetrySeries s;
  s.domain = domain;
  s.kind = kind;
  s.points = points;
  return s;
}

py::dict workload_result_dict(const WorkloadResult& r) {
  py::dict d;
  d["events_done"] = r.events_done;
  d["wall_time_s"] = r.wall_time_s;
  d["events_per_sec"] = r.events_per_sec;
  d["checksum"] = r.checksum;
  d["per_thread_events"] = r.per_thread_events;
  return d;
}

py::dict series_dict(const TelemetrySeries& s) {
  py::dict d;
  d["domain"] = s.domain.token();
  d["kind"] = std::string(to_token(s.kind));
  d["points"] = s.points;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "perfwatt core: power telemetry, deterministic workload, and perf-per-watt metrics";

  py::register_exception<Error>(m, "PerfwattError");

  m.def("decode_rapl_energy", &decode_rapl_energy, py::arg("raw"), py::arg("energy_unit_exponent"),
        "raw * 2**-exponent joules");
  m.def("delta_energy", &delta_energy, py::arg("prev_raw"), py::arg("curr_raw"),
        py::arg("counter_width_bits"), py::arg("energy_unit_exponent"),
        "wrap-corrected counter delta in joules");

  m.def("event_checksum", &event_checksum, py::arg("seed"), py::arg("event_index"),
        py::arg("work_scale"), py::arg("layers") = 16);

  m.def(
      "run_workload",
      [](std::uint64_t events, unsigned threads, std::uint64_t seed, std::uint64_t work_scale,
         unsigned layers) {
        WorkloadSpec spec;
        spec.events = events;
        spec.threads = threads;
        spec.seed = seed;
        spec.work_scale = work_scale;
        spec.layers = layers;
        WorkloadResult result;
        {
          py::gil_scoped_release release;
          result = run_workload(spec);
        }
        return workload_result_dict(result);
      },
      py::arg("events"), py::arg("threads") = 1, py::arg("seed") = 42,
      py::arg("work_scale") = 50'000, py::arg("layers") = 16);

  m.def("calibrate_work_scale", &calibrate_work_scale, py::arg("target_seconds_per_event"),
        py::arg("probe_events") = 8, py::call_guard<py::gil_scoped_release>());

  m.def(
      "integrate_power",
      [](const Points& points, std::int64_t t_start_ns, std::int64_t t_end_ns) {
        return integrate_power(make_series(points, SampleKind::InstantPowerWatts,
                                           PowerDomain(DomainKind::Package)),
                               TimeWindow{t_start_ns, t_end_ns});
      },
      py::arg("points"), py::arg("t_start_ns"), py::arg("t_end_ns"),
      "trapezoidal joules over the window; points are (t_ns, watts)");

  m.def(
      "energy_from_counter",
      [](const Points& points, std::int64_t t_start_ns, std::int64_t t_end_ns) {
        return energy_from_counter(make_series(points, SampleKind::EnergyCounterJoules,
                                               PowerDomain(DomainKind::Package)),
                                   TimeWindow{t_start_ns, t_end_ns});
      },
      py::arg("points"), py::arg("t_start_ns"), py::arg("t_end_ns"));

  m.def(
      "derive_uncore",
      [](const Points& pkg, const Points& pp0, std::optional<std::int64_t> tolerance_ns) {
        const auto result = derive_uncore(
            make_series(pkg, SampleKind::InstantPowerWatts, PowerDomain(DomainKind::Package)),
            make_series(pp0, SampleKind::InstantPowerWatts, PowerDomain(DomainKind::CoreSubsystem)),
            tolerance_ns);
        return py::make_tuple(result.series.points, result.clamped_points, result.dropped_points);
      },
      py::arg("pkg_points"), py::arg("pp0_points"), py::arg("tolerance_ns") = std::nullopt,
      "(points, clamped, dropped) for the pkg - pp0 series");

  m.def(
      "subtract_idle",
      [](double mean_watts, double idle_watts) {
        const auto result = subtract_idle(mean_watts, idle_watts);
        return py::make_tuple(result.watts, result.underflow);
      },
      py::arg("mean_watts"), py::arg("idle_watts"));

  m.def(
      "efficiency",
      [](double events_per_sec, double mean_watts) {
        const auto figures = efficiency(events_per_sec, mean_watts);
        return py::make_tuple(figures.events_per_sec_per_watt, figures.joules_per_event);
      },
      py::arg("events_per_sec"), py::arg("mean_watts"),
      "(events_per_sec_per_watt, joules_per_event or None)");

  m.def(
      "read_trace",
      [](const std::filesystem::path& path) {
        py::list out;
        for (const auto& s : read_trace(path)) out.append(series_dict(s));
        return out;
      },
      py::arg("path"));

  m.def(
      "run_sweep",
      [](std::vector<unsigned> threads, std::uint64_t events, std::uint64_t seed,
         std::uint64_t work_scale, unsigned layers, double warmup_s, int interval_ms,
         std::map<std::string, std::string> backend_params, std::string backend,
         std::optional<double> idle_watts, unsigned repetitions, std::string label,
         std::optional<std::string> record_dir) {
        SweepConfig config;
        config.thread_counts = std::move(threads);
        config.events_per_point = events;
        config.seed = seed;
        config.work_scale = work_scale;
        config.layers = layers;
        config.warmup_s = warmup_s;
        config.plan.interval_ms = interval_ms;
        const auto kind = backend_kind_from_name(backend);
        if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown backend '" + backend + "'");
        if (*kind == BackendKind::Synthetic) {
          config.backend = synthetic_descriptor(std::move(backend_params));
        } else {
          config.backend.kind = *kind;
          config.backend.parameters = std::move(backend_params);
        }
        config.idle_watts = idle_watts;
        config.repetitions = repetitions;
        config.label = std::move(label);
        if (record_dir) config.record_dir = *record_dir;

        SweepReport report;
        {
          py::gil_scoped_release release;
          report = run_sweep(config);
        }
        return report_to_json(report);
      },
      py::arg("threads"), py::arg("events"), py::arg("seed") = 42, py::arg("work_scale") = 20'000,
      py::arg("layers") = 16, py::arg("warmup_s") = 0.0, py::arg("interval_ms") = 10,
      py::arg("backend_params") = std::map<std::string, std::string>{},
      py::arg("backend") = "synthetic", py::arg("idle_watts") = std::nullopt,
      py::arg("repetitions") = 1, py::arg("label") = "sweep",
      py::arg("record_dir") = std::nullopt,
      "runs a sweep and returns the report as a JSON string");

  m.def("active_worker_count", &active_worker_count);

  m.attr("__version__") = "0.1.0";
}
