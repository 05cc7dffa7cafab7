#include "qdtherm/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qdtherm/random.hpp"

namespace qdtherm::estimator {

namespace {

struct Run {
    bool high;
    std::size_t count;
};

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / double(xs.size());
}

double sample_variance(std::span<const double> xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return acc / double(xs.size() - 1);
}

// Kolmogorov survival function Q(lambda) = 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    double previous = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) <= 1e-12 * std::abs(sum) || std::abs(term) <= 1e-3 * previous) break;
        previous = std::abs(term);
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

void DetectionConfig::validate() const {
    detail::require(std::isfinite(threshold_low) && std::isfinite(threshold_high),
                    "detection.thresholds: must be finite");
    detail::require(threshold_low < threshold_high,
                    "detection.threshold_low: must be below threshold_high");
    detail::require(min_dwell_samples >= 1, "detection.min_dwell_samples: must be >= 1");
    detail::require(high_state == 1 || high_state == 2, "detection.high_state: must be 1 or 2");
}

DetectionConfig DetectionConfig::from_levels(double current_1, double current_2,
                                             double noise_sigma, double k_sigma,
                                             std::size_t min_dwell_samples) {
    detail::require(current_1 != current_2, "detection: levels must differ");
    DetectionConfig cfg;
    const double lo = std::min(current_1, current_2);
    const double hi = std::max(current_1, current_2);
    cfg.threshold_low = lo + k_sigma * noise_sigma;
    cfg.threshold_high = hi - k_sigma * noise_sigma;
    cfg.min_dwell_samples = min_dwell_samples;
    cfg.high_state = current_1 > current_2 ? 1 : 2;
    return cfg;
}

DetectionResult detect_states(const SampledTrace& trace, const DetectionConfig& cfg) {
    cfg.validate();
    detail::require(!trace.samples.empty(), "detect_states: empty trace");
    detail::require(std::isfinite(trace.dt) && trace.dt > 0, "detect_states: dt must be > 0");

    DetectionResult result;
    const auto [min_it, max_it] = std::minmax_element(trace.samples.begin(), trace.samples.end());
    // A constant trace has a degenerate range; it is one dwell on whichever
    // side of the thresholds it sits, handled below.
    const bool constant = *min_it == *max_it;
    if (!constant && ((cfg.threshold_low < *min_it && cfg.threshold_high < *min_it) ||
                      (cfg.threshold_low > *max_it && cfg.threshold_high > *max_it))) {
        std::ostringstream msg;
        msg << "thresholds [" << cfg.threshold_low << ", " << cfg.threshold_high
            << "] lie outside the sample range [" << *min_it << ", " << *max_it << "]";
        result.diagnostic = msg.str();
        return result;
    }

    // The state before the first threshold crossing is the state of that crossing.
    const auto first = std::find_if(trace.samples.begin(), trace.samples.end(), [&](double s) {
        return s >= cfg.threshold_high || s <= cfg.threshold_low;
    });
    if (first == trace.samples.end()) {
        result.diagnostic = "no sample reaches either threshold";
        return result;
    }

    std::vector<Run> runs;
    bool high = *first >= cfg.threshold_high;
    runs.push_back({high, 0});
    for (double s : trace.samples) {
        if (high && s <= cfg.threshold_low) {
            high = false;
            runs.push_back({high, 0});
        } else if (!high && s >= cfg.threshold_high) {
            high = true;
            runs.push_back({high, 0});
        }
        ++runs.back().count;
    }

    std::vector<Run> merged;
    merged.reserve(runs.size());
    for (const Run& run : runs) {
        if (!merged.empty() && run.count < cfg.min_dwell_samples) {
            merged.back().count += run.count;
            ++result.merged_runs;
        } else if (!merged.empty() && merged.back().high == run.high) {
            merged.back().count += run.count;
        } else {
            merged.push_back(run);
        }
    }

    const int low_state = 3 - cfg.high_state;
    for (const Run& run : merged) {
        rts::append_dwell(result.events, run.high ? cfg.high_state : low_state,
                          double(run.count) * trace.dt);
    }
    // Re-sum from counts so total_time is an exact multiple of dt.
    result.events.total_time = double(trace.samples.size()) * trace.dt;
    return result;
}

InsufficientStatistics::InsufficientStatistics(std::size_t n1, std::size_t n2)
    : std::runtime_error([&] {
          std::ostringstream msg;
          msg << "insufficient statistics: " << n1 << " complete state-1 dwells and " << n2
              << " complete state-2 dwells (need >= 2 each)";
          return msg.str();
      }()),
      n1_events(n1),
      n2_events(n2) {}

std::vector<double> complete_dwells(const EventList& events, int state) {
    std::vector<double> out;
    if (events.dwells.size() < 3) return out;
    for (std::size_t i = 1; i + 1 < events.dwells.size(); ++i) {
        if (events.dwells[i].state == state) out.push_back(events.dwells[i].duration);
    }
    return out;
}

DwellTimeStats dwell_statistics(const EventList& events) {
    const auto d1 = complete_dwells(events, 1);
    const auto d2 = complete_dwells(events, 2);
    if (d1.size() < 2 || d2.size() < 2) throw InsufficientStatistics(d1.size(), d2.size());
    DwellTimeStats s;
    s.n1_events = d1.size();
    s.n2_events = d2.size();
    s.tau1_hat = mean_of(d1);
    s.tau2_hat = mean_of(d2);
    s.tau1_var = sample_variance(d1, s.tau1_hat);
    s.tau2_var = sample_variance(d2, s.tau2_hat);
    return s;
}

double fano_factor(const EventList& events, double window) {
    detail::require(std::isfinite(window) && window > 0, "fano_factor: window must be > 0");
    const double windows_exact = events.total_time / window;
    // Tolerate rounding when total_time is an exact multiple of the window.
    const auto n_windows = std::size_t(std::floor(windows_exact * (1.0 + 1e-12)));
    if (n_windows < 10) {
        std::ostringstream msg;
        msg << "fano_factor: only " << n_windows << " windows of " << window
            << " s fit in " << events.total_time << " s (need >= 10)";
        throw DomainError(msg.str());
    }
    std::vector<double> counts(n_windows, 0.0);
    double t = 0.0;
    for (std::size_t i = 0; i + 1 < events.dwells.size(); ++i) {
        t += events.dwells[i].duration;
        const auto w = std::size_t(t / window);
        if (w < n_windows) counts[w] += 1.0;
    }
    const double mean = mean_of(counts);
    if (mean == 0.0) throw DomainError("fano_factor: no transitions in the counted windows");
    return sample_variance(counts, mean) / mean;
}

double renewal_fano_factor(const rts::RateModel& model) {
    model.validate();
    const double a = model.tau1_mean;
    const double b = model.tau2_mean;
    return 2.0 * (a * a + b * b) / ((a + b) * (a + b));
}

OccupancyFraction occupancy_fraction(const EventList& events) {
    events.validate();
    double t1 = 0.0;
    double total = 0.0;
    for (const auto& d : events.dwells) {
        total += d.duration;
        if (d.state == 1) t1 += d.duration;
    }
    const double f1 = t1 / total;
    return OccupancyFraction{f1, 1.0 - f1};
}

double occupancy_fraction_sigma(const rts::RateModel& model, double total_time) {
    model.validate();
    detail::require(std::isfinite(total_time) && total_time > 0, "total_time: must be > 0");
    const double a = model.tau1_mean;
    const double b = model.tau2_mean;
    return std::sqrt(2.0 * a * a * b * b / ((a + b) * (a + b) * (a + b) * total_time));
}

KsResult ks_exponential(std::span<const double> samples) {
    detail::require(samples.size() >= 2, "ks_exponential: need at least two samples");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double mean = mean_of(xs);
    detail::require(mean > 0, "ks_exponential: sample mean must be > 0");
    const double n = double(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double cdf = -std::expm1(-xs[i] / mean);
        d = std::max({d, cdf - double(i) / n, double(i + 1) / n - cdf});
    }
    const double root_n = std::sqrt(n);
    return KsResult{d, kolmogorov_q((root_n + 0.12 + 0.11 / root_n) * d)};
}

double TemperatureInversion::value() const {
    if (!physical) {
        std::ostringstream msg;
        msg << "ratio is inconsistent with a positive temperature (inversion gives " << raw
            << " K)";
        throw UnidentifiableTemperature(msg.str());
    }
    return raw;
}

TemperatureInversion invert_log_ratio_for_temperature(double log_ratio, const Device& device,
                                                      bool infinite_reservoir) {
    device.validate();
    detail::require(std::isfinite(log_ratio), "log ratio: must be finite");
    const double x = infinite_reservoir ? ensemble::infinite_reservoir_gap(device)
                                        : ensemble::effective_energy_gap(device);
    const double excess =
        log_ratio - std::log(double(device.dot.deg1) / double(device.dot.deg2));
    if (x == 0.0) throw UnidentifiableTemperature("energy gap X is zero");
    if (excess == 0.0) {
        throw UnidentifiableTemperature("ratio equals the degeneracy ratio deg1/deg2");
    }
    const double t = x / (device.constants.k_b * excess);
    return TemperatureInversion{t, t > 0};
}

TemperatureInversion invert_ratio_for_temperature(double ratio, const Device& device,
                                                  bool infinite_reservoir) {
    detail::require(std::isfinite(ratio) && ratio > 0, "ratio: must be > 0");
    return invert_log_ratio_for_temperature(std::log(ratio), device, infinite_reservoir);
}

TemperatureEstimate estimate_temperature(const DwellTimeStats& stats, const Device& device,
                                         const EstimatorOptions& options) {
    device.validate();
    detail::require(stats.n1_events >= 1 && stats.n2_events >= 1,
                    "estimate_temperature: empty dwell statistics");
    detail::require(stats.tau1_hat > 0 && stats.tau2_hat > 0,
                    "estimate_temperature: dwell means must be > 0");

    TemperatureEstimate est;
    const double x = ensemble::effective_energy_gap(device);
    const double excess = std::log(stats.tau1_hat / stats.tau2_hat) -
                          std::log(double(device.dot.deg1) / double(device.dot.deg2));
    if (x == 0.0) {
        est.reason = "energy gap X is zero; temperature unidentifiable";
        return est;
    }
    if (std::abs(excess) < options.divergence_floor) {
        est.reason = "ratio indistinguishable from degeneracy ratio";
        est.t_hat = excess == 0.0 ? 0.0 : x / (device.constants.k_b * excess);
        return est;
    }
    est.t_hat = x / (device.constants.k_b * excess);
    const double sigma_log_ratio =
        std::sqrt(1.0 / double(stats.n1_events) + 1.0 / double(stats.n2_events));
    est.sigma_t = std::abs(est.t_hat) * sigma_log_ratio / std::abs(excess);
    if (est.t_hat <= 0) {
        est.reason = "negative temperature: ratio lies on the wrong side of deg1/deg2 for the "
                     "sign of X";
        return est;
    }
    est.valid = true;
    return est;
}

TemperatureEstimate bootstrap_temperature(const EventList& events, const Device& device,
                                          std::size_t resamples, std::uint64_t seed,
                                          const EstimatorOptions& options) {
    detail::require(resamples >= 2, "bootstrap: need at least two resamples");
    auto est = estimate_temperature(dwell_statistics(events), device, options);
    if (!est.valid) return est;
    const auto d1 = complete_dwells(events, 1);
    const auto d2 = complete_dwells(events, 2);
    Rng rng(seed);
    const auto resampled_mean = [&rng](const std::vector<double>& xs) {
        double acc = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            acc += xs[std::size_t(rng.uniform() * double(xs.size()))];
        }
        return acc / double(xs.size());
    };
    std::vector<double> temps;
    temps.reserve(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        DwellTimeStats s;
        s.n1_events = d1.size();
        s.n2_events = d2.size();
        s.tau1_hat = resampled_mean(d1);
        s.tau2_hat = resampled_mean(d2);
        const auto t = estimate_temperature(s, device, options);
        if (t.valid) temps.push_back(t.t_hat);
    }
    if (temps.size() < 2) {
        est.valid = false;
        est.reason = "bootstrap: too few valid resamples";
        return est;
    }
    est.sigma_t = std::sqrt(sample_variance(temps, mean_of(temps)));
    return est;
}

}  // namespace qdtherm::estimator
