#pragma once

// File formats shared by the simulator and the analyzer.
//
//   trace CSV   header `time_s,current_A`, one sample per line
//   events CSV  header `state,duration_s`, one dwell per line
//   sidecar     JSON next to the trace CSV (same stem, .json)
//
// Numbers are written in shortest round-trip form.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "qdtherm/rts_sim.hpp"

namespace qdtherm::io {

inline constexpr const char* kTraceHeader = "time_s,current_A";
inline constexpr const char* kEventsHeader = "state,duration_s";
inline constexpr const char* kSidecarFormat = "qdtherm-trace/1";

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what);
    std::size_t line;
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

void write_trace_csv(std::ostream& os, const rts::SampledTrace& trace);
/// `dt` overrides the spacing inferred from the time column.
rts::SampledTrace read_trace_csv(std::istream& is, const std::string& source,
                                 std::optional<double> dt = std::nullopt);

void write_events_csv(std::ostream& os, const rts::EventList& events);
rts::EventList read_events_csv(std::istream& is, const std::string& source);

nlohmann::json trace_config_json(const rts::TraceConfig& config);
/// Counts and per-state means of a ground-truth event list.
nlohmann::json dwell_summary_json(const rts::EventList& events);

std::filesystem::path sidecar_path(const std::filesystem::path& trace_csv);

void write_text_file(const std::filesystem::path& path, const std::string& contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace qdtherm::io
