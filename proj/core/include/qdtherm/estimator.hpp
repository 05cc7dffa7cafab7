#pragma once

// From a sampled current trace to a temperature: hysteresis state detection,
// dwell statistics, Poissonianity diagnostics and inversion of the
// occupation ratio.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdtherm/ensemble.hpp"
#include "qdtherm/rts_sim.hpp"

namespace qdtherm::estimator {

using ensemble::Device;
using rts::EventList;
using rts::SampledTrace;

struct DetectionConfig {
    double threshold_low = 0.0;   // A
    double threshold_high = 0.0;  // A
    std::size_t min_dwell_samples = 1;
    /// Occupancy associated with the high current level.
    int high_state = 1;

    void validate() const;

    /// Thresholds `k_sigma` noise widths inside each level.
    static DetectionConfig from_levels(double current_1, double current_2, double noise_sigma,
                                       double k_sigma = 2.0, std::size_t min_dwell_samples = 3);
};

struct DetectionResult {
    EventList events;
    /// Empty on success.
    std::string diagnostic;
    /// Raw runs shorter than min_dwell_samples that were absorbed.
    std::size_t merged_runs = 0;

    bool ok() const { return diagnostic.empty(); }
};

/// Dual-threshold state detection. Durations are integer multiples of dt.
DetectionResult detect_states(const SampledTrace& trace, const DetectionConfig& cfg);

struct DwellTimeStats {
    std::size_t n1_events = 0;
    std::size_t n2_events = 0;
    double tau1_hat = 0.0;  // s
    double tau2_hat = 0.0;  // s
    double tau1_var = 0.0;  // s^2
    double tau2_var = 0.0;  // s^2
};

class InsufficientStatistics : public std::runtime_error {
public:
    InsufficientStatistics(std::size_t n1, std::size_t n2);
    std::size_t n1_events;
    std::size_t n2_events;
};

/// Sample mean and variance per state, excluding the first and last
/// (censored) dwells. Needs at least two complete dwells of each state.
DwellTimeStats dwell_statistics(const EventList& events);

/// Variance over mean of the number of transitions per window.
double fano_factor(const EventList& events, double window);

/// Long-window Fano factor of transition counts for alternating exponential
/// dwells, 2 (tau1^2 + tau2^2) / (tau1 + tau2)^2; unity when tau1 = tau2.
double renewal_fano_factor(const rts::RateModel& model);

struct OccupancyFraction {
    double f1 = 0.0;
    double f2 = 0.0;
};

OccupancyFraction occupancy_fraction(const EventList& events);

/// Standard deviation of the time fraction in state 1 over a window of
/// `total_time` for alternating exponential dwells.
double occupancy_fraction_sigma(const rts::RateModel& model, double total_time);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

/// Kolmogorov-Smirnov test of `samples` against an exponential law with
/// their own sample mean, asymptotic Kolmogorov p-value.
KsResult ks_exponential(std::span<const double> samples);

/// Durations of all complete (non-censored) dwells in `state`.
std::vector<double> complete_dwells(const EventList& events, int state);

struct TemperatureEstimate {
    double t_hat = 0.0;    // K
    double sigma_t = 0.0;  // K
    bool valid = false;
    std::string reason;
};

struct EstimatorOptions {
    /// Minimum |ln(r deg2 / deg1)| accepted; below it T diverges.
    double divergence_floor = 1e-6;
};

/// Closed-form inverse of the occupation ratio using the measured
/// tau1_hat / tau2_hat, with delta-method uncertainty from the exponential
/// standard errors tau_hat / sqrt(n).
TemperatureEstimate estimate_temperature(const DwellTimeStats& stats, const Device& device,
                                         const EstimatorOptions& options = {});

/// Percentile-free bootstrap over complete dwells: t_hat from the full
/// sample, sigma_t as the standard deviation over resamples.
TemperatureEstimate bootstrap_temperature(const EventList& events, const Device& device,
                                          std::size_t resamples, std::uint64_t seed,
                                          const EstimatorOptions& options = {});

class UnidentifiableTemperature : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct TemperatureInversion {
    double raw = 0.0;  // K, negative when the ratio sits on the wrong side of deg1/deg2
    bool physical = false;

    /// Throws UnidentifiableTemperature for non-physical inversions.
    double value() const;
};

/// T = X / (k_B ln(ratio deg2 / deg1)). With `infinite_reservoir` the N2 ->
/// infinity gap is used instead of X.
TemperatureInversion invert_ratio_for_temperature(double ratio, const Device& device,
                                                  bool infinite_reservoir = false);
/// Same, from ln(ratio); for ratios outside the double range.
TemperatureInversion invert_log_ratio_for_temperature(double log_ratio, const Device& device,
                                                      bool infinite_reservoir = false);

}  // namespace qdtherm::estimator
