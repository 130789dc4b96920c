#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "perfwatt/types.hpp"

namespace perfwatt {

// Raw sample trace, CSV with header `t_ns,domain,kind,value`, rows sorted by t_ns.
// Written by the sampler's record mode, consumed by the replay backend; the two
// round-trip exactly (decimal values are shortest round-trip representations).

/// Parses a trace file into per-domain series (first-appearance order).
/// Throws ReplayFileUnreadable on a missing file or any format violation,
/// including unsorted rows, non-monotone per-domain timestamps, negative
/// values, and the reserved derived-uncore token.
std::vector<TelemetrySeries> read_trace(const std::filesystem::path& path);

/// Merges series back into globally time-sorted rows and writes them.
/// Rows at equal timestamps keep the series order given here.
void write_trace(std::ostream& out, const std::vector<TelemetrySeries>& series);
void write_trace(const std::filesystem::path& path, const std::vector<TelemetrySeries>& series);

}  // namespace perfwatt
