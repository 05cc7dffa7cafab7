#include "qdtherm/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <system_error>

namespace qdtherm::io {

namespace {

double parse_double(std::string_view field, const std::string& source, std::size_t line,
                    const char* column) {
    double value = 0.0;
    const auto* begin = field.data();
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ParseError(source, line,
                         std::string("column ") + column + ": not a finite number '" +
                             std::string(field) + "'");
    }
    return value;
}

std::string_view trim_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

std::pair<std::string_view, std::string_view> split_two(std::string_view line,
                                                        const std::string& source,
                                                        std::size_t lineno) {
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
        throw ParseError(source, lineno, "expected exactly two comma-separated fields");
    }
    return {line.substr(0, comma), line.substr(comma + 1)};
}

void expect_header(std::istream& is, const std::string& source, const char* header) {
    std::string line;
    if (!std::getline(is, line)) throw ParseError(source, 1, "empty file");
    if (trim_cr(line) != header) {
        throw ParseError(source, 1,
                         std::string("expected header '") + header + "', got '" + line + "'");
    }
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line_no, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line_no) + ": " + what), line(line_no) {}

std::string format_double(double x) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

void write_trace_csv(std::ostream& os, const rts::SampledTrace& trace) {
    os << kTraceHeader << '\n';
    char buf[64];
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        char* p = std::to_chars(buf, buf + 30, trace.time(i)).ptr;
        *p++ = ',';
        p = std::to_chars(p, buf + sizeof buf - 1, trace.samples[i]).ptr;
        *p++ = '\n';
        os.write(buf, p - buf);
    }
}

rts::SampledTrace read_trace_csv(std::istream& is, const std::string& source,
                                 std::optional<double> dt) {
    expect_header(is, source, kTraceHeader);
    rts::SampledTrace trace;
    std::vector<double> times;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        const auto view = trim_cr(line);
        if (view.empty()) continue;
        const auto [t, i] = split_two(view, source, lineno);
        times.push_back(parse_double(t, source, lineno, "time_s"));
        trace.samples.push_back(parse_double(i, source, lineno, "current_A"));
    }
    if (trace.samples.empty()) throw ParseError(source, lineno, "no samples");
    trace.t0 = times.front();
    if (dt) {
        trace.dt = *dt;
    } else if (times.size() >= 2) {
        trace.dt = (times.back() - times.front()) / double(times.size() - 1);
    } else {
        throw ParseError(source, 2, "single sample and no dt available");
    }
    if (!(trace.dt > 0)) throw ParseError(source, 2, "time column is not increasing");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (std::abs(times[k] - trace.time(k)) > 1e-6 * trace.dt + 1e-12 * std::abs(times[k])) {
            throw ParseError(source, k + 2, "time column is not uniformly spaced at dt = " +
                                                format_double(trace.dt));
        }
    }
    return trace;
}

void write_events_csv(std::ostream& os, const rts::EventList& events) {
    os << kEventsHeader << '\n';
    for (const auto& d : events.dwells) os << d.state << ',' << format_double(d.duration) << '\n';
}

rts::EventList read_events_csv(std::istream& is, const std::string& source) {
    expect_header(is, source, kEventsHeader);
    rts::EventList events;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        const auto view = trim_cr(line);
        if (view.empty()) continue;
        const auto [s, d] = split_two(view, source, lineno);
        if (s != "1" && s != "2") throw ParseError(source, lineno, "state must be 1 or 2");
        const int state = s == "1" ? 1 : 2;
        const double duration = parse_double(d, source, lineno, "duration_s");
        if (duration <= 0) throw ParseError(source, lineno, "duration must be > 0");
        if (!events.dwells.empty() && events.dwells.back().state == state) {
            throw ParseError(source, lineno, "states do not alternate");
        }
        rts::append_dwell(events, state, duration);
    }
    if (events.dwells.empty()) throw ParseError(source, lineno, "no dwells");
    return events;
}

nlohmann::json trace_config_json(const rts::TraceConfig& c) {
    return {{"sample_rate_hz", c.sample_rate},
            {"current_1_a", c.current_1},
            {"current_2_a", c.current_2},
            {"noise_sigma_a", c.noise_sigma},
            {"seed", c.seed}};
}

nlohmann::json dwell_summary_json(const rts::EventList& events) {
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    double t1 = 0.0;
    double t2 = 0.0;
    for (const auto& d : events.dwells) {
        if (d.state == 1) {
            ++n1;
            t1 += d.duration;
        } else {
            ++n2;
            t2 += d.duration;
        }
    }
    return {{"initial_state", events.initial_state},
            {"dwells", events.dwells.size()},
            {"transitions", events.transitions()},
            {"n1_dwells", n1},
            {"n2_dwells", n2},
            {"time_in_state_1_s", t1},
            {"time_in_state_2_s", t2},
            {"mean_dwell_1_s", n1 ? t1 / double(n1) : 0.0},
            {"mean_dwell_2_s", n2 ? t2 / double(n2) : 0.0},
            {"total_time_s", events.total_time}};
}

std::filesystem::path sidecar_path(const std::filesystem::path& trace_csv) {
    auto p = trace_csv;
    p.replace_extension(".json");
    return p;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    os << contents;
    if (!os) throw IoError("write to '" + path.string() + "' failed");
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace qdtherm::io
