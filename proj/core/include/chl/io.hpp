#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "chl/disc.hpp"
#include "chl/growth.hpp"
#include "chl/hull.hpp"
#include "chl/loewner.hpp"

namespace chl {

/// Shortest round-trip decimal form of a double (std::to_chars), so files
/// are byte-deterministic and parse back to the identical bits.
std::string format_double(double v);

/// Trace CSV with header k,x,L,R,scale,push_R,push_L, one row per sampled
/// step, ordered by k. The scale column holds the dyadic index, "min" or
/// "over".
std::string trace_to_csv(const Trace& trace);

/// Parses a trace CSV. Requires every step present (stride 1), since
/// consumers replay attachments instead of rerunning the RNG.
Trace trace_from_csv(const std::string& text);

std::string envelope_to_csv(const EnvelopePolyline& env);  // s,re,im
std::string scales_to_csv(std::span<const ScalePushStat> stats);
std::string discrepancy_to_csv(std::span<const DiscrepancyRow> rows);
std::string disc_trace_to_csv(std::span<const DiscTraceRow> rows);  // k,theta,arc_lo,arc_hi

void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace chl
