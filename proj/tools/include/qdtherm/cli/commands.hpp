#pragma once

// The batch front-end: one function per verb, plus the reusable pieces the
// verbs are composed of.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdtherm/cli/config.hpp"
#include "qdtherm/estimator.hpp"
#include "qdtherm/rts_sim.hpp"

namespace qdtherm::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitIo = 2,
    kExitNumerical = 3,
};

enum class Format { kJson, kCsv };

/// `lo:hi:n`, n points, inclusive.
struct Range {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 1;

    std::vector<double> linear() const;
    std::vector<double> logarithmic() const;
};

Range parse_range(const std::string& text);

// ---------------------------------------------------------------------------
// Building blocks

struct Simulation {
    double log_ratio = 0.0;
    rts::RateModel rates;
    rts::EventList events;
    rts::TraceConfig trace_config;
    rts::SampledTrace trace;
};

/// Ratio at the configured temperature, closed with attempt_rate, then
/// events (seed) and noise (mix_seed(seed)).
Simulation simulate(const RunConfig& config);

nlohmann::json sidecar_json(const RunConfig& config, const Simulation& sim);

struct Analysis {
    estimator::DetectionConfig detection;
    estimator::DetectionResult detected;
    std::optional<estimator::DwellTimeStats> stats;
    std::optional<double> fano;
    double fano_window = 0.0;
    estimator::OccupancyFraction fractions;
    estimator::TemperatureEstimate estimate;
};

/// Detection, statistics and temperature. Throws InsufficientStatistics
/// when the detected trace has too few complete dwells.
Analysis analyze_trace(const rts::SampledTrace& trace, const RunConfig& config,
                       const estimator::DetectionConfig& detection);

nlohmann::json analysis_json(const Analysis& a, const nlohmann::json& inputs_echo);

struct RoundTrip {
    std::uint64_t seed = 0;
    double t_true = 0.0;
    estimator::TemperatureEstimate estimate;
    std::size_t true_transitions = 0;
    std::size_t detected_transitions = 0;

    double z() const { return (estimate.t_hat - t_true) / estimate.sigma_t; }
};

RoundTrip roundtrip_once(const RunConfig& config, std::uint64_t seed);

struct RoundTripSummary {
    std::size_t runs = 0;
    std::size_t valid = 0;
    double mean_z = 0.0;
    double std_z = 0.0;
    /// Fraction of valid runs whose +-3 sigma interval covers t_true.
    double coverage_3sigma = 0.0;
    double max_abs_rel_error = 0.0;
};

RoundTripSummary summarize(const std::vector<RoundTrip>& runs);

struct LimitRow {
    std::int64_t n2 = 0;
    double sigma2 = 0.0;      // nm^2
    double mu = 0.0;          // meV
    double log_ratio = 0.0;
    double log_ratio_infinite = 0.0;
    double gap = 0.0;         // |ratio / ratio_infinite - 1|
};

struct LimitSweep {
    std::vector<LimitRow> rows;
    /// Least-squares slope of ln gap against ln N2; NaN with fewer than two rows.
    double slope = 0.0;
};

/// Finite vs infinite reservoir ratio over log-spaced N2. With
/// `fixed_density` Sigma2 scales with N2 so mu stays fixed; otherwise Sigma2
/// stays fixed and mu grows linearly with N2.
LimitSweep limit_sweep(const RunConfig& config, const Range& n2_range, bool fixed_density);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Verbs. Each writes its primary output to `out` and, when out_dir is set,
// to a file there.

struct OutputOptions {
    Format format = Format::kJson;
    std::string out_dir;
};

int cmd_thermo(const RunConfig& config, const std::optional<Range>& t_sweep,
               const OutputOptions& opts, std::ostream& out);
int cmd_ratio(const RunConfig& config, const std::optional<Range>& n2_sweep,
              const OutputOptions& opts, std::ostream& out);
int cmd_simulate(const RunConfig& config, const OutputOptions& opts, std::ostream& out);
int cmd_analyze(const std::string& trace_path, const RunConfig& config,
                const OutputOptions& opts, std::ostream& out);
int cmd_roundtrip(const RunConfig& config, std::size_t repeats, const OutputOptions& opts,
                  std::ostream& out);
int cmd_limit_sweep(const RunConfig& config, const Range& n2_range, bool fixed_density,
                    const OutputOptions& opts, std::ostream& out);

/// Full command line entry point; maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qdtherm::cli
