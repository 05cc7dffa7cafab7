#pragma once

// Two-state random telegraph signal: alternating exponential dwells and
// their rendering as a sampled, noisy current trace.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qdtherm/constants.hpp"

namespace qdtherm::rts {

struct RateModel {
    double tau1_mean = 0.0;  // s, dwell in N1 = 1
    double tau2_mean = 0.0;  // s, dwell in N1 = 2

    void validate() const;
    /// Long-run fraction of time spent in state 1.
    double stationary_p1() const { return tau1_mean / (tau1_mean + tau2_mean); }
};

struct Dwell {
    int state = 1;
    double duration = 0.0;  // s

    bool operator==(const Dwell&) const = default;
};

struct EventList {
    int initial_state = 1;
    std::vector<Dwell> dwells;
    double total_time = 0.0;  // s

    /// Checks alternation, positive durations and the total.
    void validate() const;
    std::size_t transitions() const { return dwells.empty() ? 0 : dwells.size() - 1; }

    bool operator==(const EventList&) const = default;
};

/// Appends a dwell, merging with the last one when the state repeats.
void append_dwell(EventList& events, int state, double duration);

struct TraceConfig {
    double sample_rate = 1.0e5;   // Hz
    double current_1 = 1.2e-10;   // A, level while N1 = 1
    double current_2 = 1.0e-10;   // A, level while N1 = 2
    double noise_sigma = 0.0;     // A
    std::uint64_t seed = 1;

    void validate() const;
    double level(int state) const { return state == 1 ? current_1 : current_2; }
};

struct SampledTrace {
    double t0 = 0.0;  // s
    double dt = 0.0;  // s
    std::vector<double> samples;  // A
    std::optional<EventList> truth;
    /// Dwells that contained no sample point.
    std::size_t sub_sample_dwells = 0;

    double time(std::size_t i) const { return t0 + double(i) * dt; }
};

/// tau2 = 1 / attempt_rate, tau1 = ratio / attempt_rate.
RateModel dwell_means_from_ratio(double ratio, double attempt_rate);

/// `target_transitions` transitions, i.e. target_transitions + 1 dwells. The
/// initial state is drawn from the stationary time fraction.
EventList simulate_events(const RateModel& model, std::size_t target_transitions,
                          std::uint64_t seed);

/// Piecewise-constant two-level signal sampled at t0 + i dt, plus white
/// Gaussian noise. Sample i takes the state whose dwell contains its time.
SampledTrace render_trace(const EventList& events, const TraceConfig& config);

/// Noiseless number of samples falling in each dwell.
std::vector<std::size_t> samples_per_dwell(const EventList& events, double dt);

}  // namespace qdtherm::rts
