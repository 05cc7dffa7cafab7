#include "qdtherm/rts_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdtherm/random.hpp"

namespace qdtherm::rts {

namespace {

constexpr double kTotalRelTol = 1e-9;

// First sample index whose time i * dt is at or after t.
std::size_t first_index_at_or_after(double t, double sample_rate) {
    return std::size_t(std::max(0.0, std::ceil(t * sample_rate)));
}

std::size_t sample_count(double total_time, double sample_rate) {
    return std::max<std::size_t>(1, first_index_at_or_after(total_time, sample_rate));
}

}  // namespace

void RateModel::validate() const {
    detail::require(std::isfinite(tau1_mean) && tau1_mean > 0, "rates.tau1_mean: must be > 0");
    detail::require(std::isfinite(tau2_mean) && tau2_mean > 0, "rates.tau2_mean: must be > 0");
}

void EventList::validate() const {
    detail::require(initial_state == 1 || initial_state == 2,
                    "events.initial_state: must be 1 or 2");
    detail::require(!dwells.empty(), "events: no dwells");
    detail::require(dwells.front().state == initial_state,
                    "events: first dwell does not match initial_state");
    double sum = 0.0;
    for (std::size_t i = 0; i < dwells.size(); ++i) {
        const auto& d = dwells[i];
        if (d.state != 1 && d.state != 2) {
            std::ostringstream msg;
            msg << "events: dwell " << i << " has state " << d.state;
            throw DomainError(msg.str());
        }
        if (!(std::isfinite(d.duration) && d.duration > 0)) {
            std::ostringstream msg;
            msg << "events: dwell " << i << " has nonpositive duration " << d.duration;
            throw DomainError(msg.str());
        }
        if (i > 0 && d.state == dwells[i - 1].state) {
            std::ostringstream msg;
            msg << "events: dwells " << i - 1 << " and " << i << " do not alternate";
            throw DomainError(msg.str());
        }
        sum += d.duration;
    }
    detail::require(std::abs(sum - total_time) <= kTotalRelTol * total_time,
                    "events: durations do not sum to total_time");
}

void append_dwell(EventList& events, int state, double duration) {
    if (events.dwells.empty()) {
        events.initial_state = state;
        events.dwells.push_back({state, duration});
    } else if (events.dwells.back().state == state) {
        events.dwells.back().duration += duration;
    } else {
        events.dwells.push_back({state, duration});
    }
    events.total_time += duration;
}

void TraceConfig::validate() const {
    detail::require(std::isfinite(sample_rate) && sample_rate > 0,
                    "trace.sample_rate: must be > 0");
    detail::require(std::isfinite(current_1) && std::isfinite(current_2),
                    "trace.current: levels must be finite");
    detail::require(current_1 != current_2, "trace.current_1: must differ from current_2");
    detail::require(std::isfinite(noise_sigma) && noise_sigma >= 0,
                    "trace.noise_sigma: must be >= 0");
}

RateModel dwell_means_from_ratio(double ratio, double attempt_rate) {
    detail::require(std::isfinite(ratio) && ratio > 0, "ratio: must be > 0");
    detail::require(std::isfinite(attempt_rate) && attempt_rate > 0,
                    "attempt_rate: must be > 0");
    return RateModel{ratio / attempt_rate, 1.0 / attempt_rate};
}

EventList simulate_events(const RateModel& model, std::size_t target_transitions,
                          std::uint64_t seed) {
    model.validate();
    detail::require(target_transitions >= 1, "target_transitions: must be >= 1");
    Rng rng(seed);
    EventList out;
    out.initial_state = rng.uniform() < model.stationary_p1() ? 1 : 2;
    out.dwells.reserve(target_transitions + 1);
    int state = out.initial_state;
    for (std::size_t i = 0; i <= target_transitions; ++i) {
        const double mean = state == 1 ? model.tau1_mean : model.tau2_mean;
        double d = rng.exponential(mean);
        // log1p(-u) is zero only for u = 0; keep durations strictly positive.
        if (d <= 0) d = mean * 0x1.0p-53;
        out.dwells.push_back({state, d});
        out.total_time += d;
        state = 3 - state;
    }
    return out;
}

std::vector<std::size_t> samples_per_dwell(const EventList& events, double dt) {
    detail::require(std::isfinite(dt) && dt > 0, "dt: must be > 0");
    const double rate = 1.0 / dt;
    const std::size_t n = sample_count(events.total_time, rate);
    std::vector<std::size_t> counts;
    counts.reserve(events.dwells.size());
    double edge = 0.0;
    std::size_t begin = 0;
    for (std::size_t k = 0; k < events.dwells.size(); ++k) {
        edge += events.dwells[k].duration;
        const std::size_t end = k + 1 == events.dwells.size()
                                    ? n
                                    : std::min(n, first_index_at_or_after(edge, rate));
        counts.push_back(end > begin ? end - begin : 0);
        begin = std::max(begin, end);
    }
    return counts;
}

SampledTrace render_trace(const EventList& events, const TraceConfig& config) {
    events.validate();
    config.validate();
    SampledTrace trace;
    trace.dt = 1.0 / config.sample_rate;
    const auto counts = samples_per_dwell(events, trace.dt);
    std::size_t n = 0;
    for (std::size_t c : counts) n += c;
    trace.samples.reserve(n);
    for (std::size_t k = 0; k < counts.size(); ++k) {
        if (counts[k] == 0) ++trace.sub_sample_dwells;
        trace.samples.insert(trace.samples.end(), counts[k], config.level(events.dwells[k].state));
    }
    if (config.noise_sigma > 0) {
        Rng rng(config.seed);
        for (double& s : trace.samples) s += config.noise_sigma * rng.normal();
    }
    trace.truth = events;
    return trace;
}

}  // namespace qdtherm::rts
