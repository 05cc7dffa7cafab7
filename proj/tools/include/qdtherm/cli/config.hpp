#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "qdtherm/ensemble.hpp"
#include "qdtherm/estimator.hpp"
#include "qdtherm/rts_sim.hpp"

namespace qdtherm::cli {

/// Invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    PhysicalConstants constants;
    ensemble::ReservoirSpec reservoir;
    ensemble::DotSpec dot;
    ensemble::MuSource mu_source = ensemble::MuSource::kSommerfeld;
    double temperature = 4.2;     // K
    double attempt_rate = 1.0e3;  // Hz, anchors tau2 = 1 / attempt_rate
    std::size_t transitions = 10000;
    rts::TraceConfig trace;
    /// Explicit thresholds; when absent they are derived from the trace levels.
    std::optional<estimator::DetectionConfig> detection;
    double threshold_sigmas = 2.0;
    std::size_t min_dwell_samples = 3;
    double divergence_floor = 1e-6;
    std::optional<double> fano_window;  // s
    std::uint64_t seed = 1;
    std::string output_dir;

    /// The documented default scenario.
    static RunConfig defaults();
    /// Starts from defaults() and applies the fields present in `j`.
    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;

    ensemble::Device device() const { return {reservoir, dot, constants}; }
    ensemble::EnsembleParams params() const;
    /// Detection thresholds for a trace rendered with `trace_config`.
    estimator::DetectionConfig detection_for(const rts::TraceConfig& trace_config) const;
};

RunConfig load_config(const std::string& path);

}  // namespace qdtherm::cli
