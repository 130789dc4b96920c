#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "perfwatt/sweep.hpp"

namespace perfwatt {

// All emitters are pure functions of the report: identical reports produce
// byte-identical files. Wall-clock time lives in the report metadata only
// and is never stamped at emission time.

enum class ReportFormat { Csv, Json, Plotdat, Svg };
std::string_view to_string(ReportFormat format) noexcept;
/// Parses a comma-separated format list ("csv,json,plotdat,svg").
std::vector<ReportFormat> parse_format_list(std::string_view text);

enum class FigureKind { AbsPerf, EffScaling, PerfVsPower };
std::string_view figure_name(FigureKind kind) noexcept;

/// One row per point × measured domain, header
/// threads,events,wall_s,eps,domain,mean_w,energy_j,eps_per_w,j_per_event.
void emit_csv(const SweepReport& report, std::ostream& out);
void emit_csv(const SweepReport& report, const std::filesystem::path& path);

std::string report_to_json(const SweepReport& report);
void emit_json(const SweepReport& report, const std::filesystem::path& path);
SweepReport parse_report_json(const std::string& text);
SweepReport load_report_json(const std::filesystem::path& path);

/// Plot-ready whitespace-separated columns for one of the three figures.
/// Throws EmptySweep when the report has no points.
void emit_figure_data(const SweepReport& report, FigureKind figure, std::ostream& out);
void emit_figure_data(const SweepReport& report, FigureKind figure, const std::filesystem::path& path);

/// Self-contained SVG chart for the same figure.
void emit_figure_svg(const SweepReport& report, FigureKind figure, const std::filesystem::path& path);

/// Overlaid perf-vs-power series, one block per sweep, labels deduplicated
/// with a numeric suffix. Throws FewerThanTwoSweeps.
void compare_perf_vs_power(const std::vector<SweepReport>& sweeps, std::ostream& out);
void compare_perf_vs_power(const std::vector<SweepReport>& sweeps, const std::filesystem::path& path);
void compare_perf_vs_power_svg(const std::vector<SweepReport>& sweeps, const std::filesystem::path& path);

/// Emits report.csv / report.json / fig_*.dat / fig_*.svg per requested
/// format into output_dir; returns the files written.
std::vector<std::filesystem::path> emit_report_bundle(const SweepReport& report,
                                                      const std::vector<ReportFormat>& formats,
                                                      const std::filesystem::path& output_dir);

/// Sidecar for raw traces: config echo, host metadata, and per-point
/// workload results and windows. Together with raw.trace it is enough to
/// re-derive every report number offline.
void write_workload_json(const std::filesystem::path& path, const SweepReport& report);

/// Rebuilds the full report from a recorded trace plus its workload sidecar;
/// the result is bit-identical to the live report.
SweepReport recompute_report(const std::filesystem::path& trace_path,
                             const std::filesystem::path& workload_json_path);

}  // namespace perfwatt
