#include "perfwatt/trace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "perfwatt/error.hpp"

namespace perfwatt {

namespace {

constexpr std::string_view kHeader = "t_ns,domain,kind,value";

[[noreturn]] void trace_error(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ReplayFileUnreadable,
              path.string() + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

std::vector<TelemetrySeries> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::ReplayFileUnreadable, "cannot open trace file " + path.string());
  }

  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) trace_error(path, line_no, "empty file, expected header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) trace_error(path, line_no, "bad header, expected '" + std::string(kHeader) + "'");

  std::vector<TelemetrySeries> series;
  std::int64_t last_row_ns = INT64_MIN;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    if (fields.size() != 4) trace_error(path, line_no, "expected 4 fields, got " + std::to_string(fields.size()));

    const auto t_ns = parse_int64(fields[0]);
    if (!t_ns) trace_error(path, line_no, "bad timestamp '" + std::string(fields[0]) + "'");
    if (*t_ns < last_row_ns) trace_error(path, line_no, "rows not sorted by t_ns");
    last_row_ns = *t_ns;

    const auto domain = PowerDomain::from_token(fields[1]);
    if (!domain) trace_error(path, line_no, "bad domain token '" + std::string(fields[1]) + "'");
    if (domain->kind() == DomainKind::UncoreDerived) {
      trace_error(path, line_no, "derived uncore is never part of a raw trace");
    }

    const auto kind = sample_kind_from_token(fields[2]);
    if (!kind) trace_error(path, line_no, "bad kind token '" + std::string(fields[2]) + "'");

    const auto value = parse_decimal(fields[3]);
    if (!value) trace_error(path, line_no, "bad value '" + std::string(fields[3]) + "'");
    if (*value < 0.0) trace_error(path, line_no, "negative sample value");

    auto it = std::find_if(series.begin(), series.end(),
                           [&](const TelemetrySeries& s) { return s.domain == *domain; });
    if (it == series.end()) {
      series.push_back(TelemetrySeries{*domain, *kind, {}});
      it = series.end() - 1;
    } else {
      if (it->kind != *kind) trace_error(path, line_no, "kind changes within domain " + domain->token());
      if (it->points.back().first >= *t_ns) {
        trace_error(path, line_no, "timestamps not strictly increasing within domain " + domain->token());
      }
    }
    it->points.emplace_back(*t_ns, *value);
  }

  if (series.empty()) trace_error(path, line_no, "trace has no data rows");
  return series;
}

void write_trace(std::ostream& out, const std::vector<TelemetrySeries>& series) {
  struct Row {
    std::int64_t t_ns;
    std::size_t series_index;
    std::size_t point_index;
  };
  std::vector<Row> rows;
  std::size_t total = 0;
  for (const auto& s : series) total += s.points.size();
  rows.reserve(total);
  for (std::size_t si = 0; si < series.size(); ++si) {
    for (std::size_t pi = 0; pi < series[si].points.size(); ++pi) {
      rows.push_back(Row{series[si].points[pi].first, si, pi});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.t_ns != b.t_ns) return a.t_ns < b.t_ns;
    return a.series_index < b.series_index;
  });

  out << kHeader << '\n';
  for (const Row& row : rows) {
    const auto& s = series[row.series_index];
    out << row.t_ns << ',' << s.domain.token() << ',' << to_token(s.kind) << ','
        << format_decimal(s.points[row.point_index].second) << '\n';
  }
}

void write_trace(const std::filesystem::path& path, const std::vector<TelemetrySeries>& series) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  write_trace(out, series);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

}  // namespace perfwatt
