#include "qdtherm/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qdtherm/fermi2d.hpp"
#include "qdtherm/io.hpp"

namespace qdtherm::cli {

using nlohmann::json;

namespace {

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void reject_unknown(const json& obj, const std::string& prefix,
                    std::initializer_list<const char*> known) {
    const std::set<std::string> allowed(known.begin(), known.end());
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError(join(prefix, key) + ": unknown field");
    }
}

const json* section(const json& j, const std::string& prefix, const char* key) {
    if (!j.contains(key)) return nullptr;
    const json& s = j.at(key);
    if (!s.is_object()) throw ConfigError(join(prefix, key) + ": expected an object");
    return &s;
}

void read_number(const json& j, const std::string& prefix, const char* key, double& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(join(prefix, key) + ": expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(join(prefix, key) + ": must be finite");
}

template <class Int>
void read_integer(const json& j, const std::string& prefix, const char* key, Int& out) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (v.is_number_unsigned()) {
        out = Int(v.get<std::uint64_t>());
    } else if (v.is_number_integer()) {
        const auto x = v.get<std::int64_t>();
        if constexpr (std::is_unsigned_v<Int>) {
            if (x < 0) throw ConfigError(join(prefix, key) + ": must be nonnegative");
        }
        out = Int(x);
    } else {
        throw ConfigError(join(prefix, key) + ": expected an integer");
    }
}

// Field names in the DomainError messages already follow the config layout.
template <class F>
void as_config_error(F&& f) {
    try {
        f();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

RunConfig RunConfig::defaults() {
    RunConfig c;
    c.reservoir.n2 = 100;
    c.reservoir.sigma2 = 100.0 * 100.0;
    c.reservoir.g = fermi2d::dos_2d(c.constants);
    // Scenario values, chosen so that beta X is close to 1 at 4.2 K.
    c.dot.e_t = 25.538;
    c.dot.delta_e_c = 10.0;
    c.dot.delta_e_l = 5.0;
    c.dot.deg1 = 2;
    c.dot.deg2 = 1;
    c.dot.sigma1 = 0.0;
    c.trace.sample_rate = 1.0e5;
    c.trace.current_1 = 1.2e-10;
    c.trace.current_2 = 1.0e-10;
    c.trace.noise_sigma = 0.2e-10 / 6.0;
    return c;
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown(j, "",
                   {"constants", "reservoir", "dot", "mu_source", "temperature_k",
                    "attempt_rate_hz", "transitions", "trace", "detection", "estimator", "seed",
                    "output_dir"});
    RunConfig c = defaults();

    if (const json* s = section(j, "", "constants")) {
        reject_unknown(*s, "constants", {"k_b_mev_per_k", "hbar_mev_s", "m_eff_kg"});
        read_number(*s, "constants", "k_b_mev_per_k", c.constants.k_b);
        read_number(*s, "constants", "hbar_mev_s", c.constants.hbar);
        read_number(*s, "constants", "m_eff_kg", c.constants.m_eff);
        as_config_error([&] { c.constants.validate(); });
        c.reservoir.g = fermi2d::dos_2d(c.constants);
    }
    if (const json* s = section(j, "", "reservoir")) {
        reject_unknown(*s, "reservoir", {"n2", "sigma2_nm2", "g_per_mev_nm2"});
        read_integer(*s, "reservoir", "n2", c.reservoir.n2);
        read_number(*s, "reservoir", "sigma2_nm2", c.reservoir.sigma2);
        read_number(*s, "reservoir", "g_per_mev_nm2", c.reservoir.g);
    }
    if (const json* s = section(j, "", "dot")) {
        reject_unknown(*s, "dot",
                       {"e_t_mev", "delta_e_c_mev", "delta_e_l_mev", "huang_rhys", "deg1", "deg2",
                        "sigma1_nm2"});
        read_number(*s, "dot", "e_t_mev", c.dot.e_t);
        read_number(*s, "dot", "delta_e_c_mev", c.dot.delta_e_c);
        read_number(*s, "dot", "delta_e_l_mev", c.dot.delta_e_l);
        read_integer(*s, "dot", "deg1", c.dot.deg1);
        read_integer(*s, "dot", "deg2", c.dot.deg2);
        read_number(*s, "dot", "sigma1_nm2", c.dot.sigma1);
        if (const json* hr = section(*s, "dot", "huang_rhys")) {
            if (s->contains("delta_e_l_mev")) {
                throw ConfigError("dot.huang_rhys: conflicts with dot.delta_e_l_mev");
            }
            reject_unknown(*hr, "dot.huang_rhys", {"s_hr", "hbar_omega_mev"});
            if (!hr->contains("s_hr") || !hr->contains("hbar_omega_mev")) {
                throw ConfigError("dot.huang_rhys: needs both s_hr and hbar_omega_mev");
            }
            double s_hr = 0.0;
            double hw = 0.0;
            read_number(*hr, "dot.huang_rhys", "s_hr", s_hr);
            read_number(*hr, "dot.huang_rhys", "hbar_omega_mev", hw);
            as_config_error([&] {
                const auto d = ensemble::DotSpec::with_huang_rhys(c.dot.e_t, c.dot.delta_e_c,
                                                                 s_hr, hw, c.dot.sigma1);
                c.dot.delta_e_l = d.delta_e_l;
            });
        }
    }
    if (j.contains("mu_source")) {
        const json& v = j.at("mu_source");
        if (v == "sommerfeld") {
            c.mu_source = ensemble::MuSource::kSommerfeld;
        } else if (v == "oracle") {
            c.mu_source = ensemble::MuSource::kOracle;
        } else {
            throw ConfigError("mu_source: expected \"sommerfeld\" or \"oracle\"");
        }
    }
    read_number(j, "", "temperature_k", c.temperature);
    read_number(j, "", "attempt_rate_hz", c.attempt_rate);
    read_integer(j, "", "transitions", c.transitions);
    if (const json* s = section(j, "", "trace")) {
        reject_unknown(*s, "trace",
                       {"sample_rate_hz", "current_1_a", "current_2_a", "noise_sigma_a"});
        read_number(*s, "trace", "sample_rate_hz", c.trace.sample_rate);
        read_number(*s, "trace", "current_1_a", c.trace.current_1);
        read_number(*s, "trace", "current_2_a", c.trace.current_2);
        read_number(*s, "trace", "noise_sigma_a", c.trace.noise_sigma);
    }
    if (const json* s = section(j, "", "detection")) {
        reject_unknown(*s, "detection",
                       {"threshold_low_a", "threshold_high_a", "min_dwell_samples",
                        "threshold_sigmas", "high_state"});
        const bool has_low = s->contains("threshold_low_a");
        const bool has_high = s->contains("threshold_high_a");
        if (has_low != has_high) {
            throw ConfigError(std::string("detection.") +
                              (has_low ? "threshold_high_a" : "threshold_low_a") +
                              ": required when the other threshold is given");
        }
        read_integer(*s, "detection", "min_dwell_samples", c.min_dwell_samples);
        read_number(*s, "detection", "threshold_sigmas", c.threshold_sigmas);
        if (has_low) {
            estimator::DetectionConfig d;
            read_number(*s, "detection", "threshold_low_a", d.threshold_low);
            read_number(*s, "detection", "threshold_high_a", d.threshold_high);
            d.min_dwell_samples = c.min_dwell_samples;
            read_integer(*s, "detection", "high_state", d.high_state);
            c.detection = d;
        } else if (s->contains("high_state")) {
            throw ConfigError("detection.high_state: only used with explicit thresholds");
        }
    }
    if (const json* s = section(j, "", "estimator")) {
        reject_unknown(*s, "estimator", {"divergence_floor", "fano_window_s"});
        read_number(*s, "estimator", "divergence_floor", c.divergence_floor);
        if (s->contains("fano_window_s")) {
            double w = 0.0;
            read_number(*s, "estimator", "fano_window_s", w);
            c.fano_window = w;
        }
    }
    read_integer(j, "", "seed", c.seed);
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) throw ConfigError("output_dir: expected a string");
        c.output_dir = j.at("output_dir").get<std::string>();
    }
    c.validate();
    return c;
}

json RunConfig::to_json() const {
    json j = {
        {"constants",
         {{"k_b_mev_per_k", constants.k_b},
          {"hbar_mev_s", constants.hbar},
          {"m_eff_kg", constants.m_eff}}},
        {"reservoir",
         {{"n2", reservoir.n2},
          {"sigma2_nm2", reservoir.sigma2},
          {"g_per_mev_nm2", reservoir.g}}},
        {"dot",
         {{"e_t_mev", dot.e_t},
          {"delta_e_c_mev", dot.delta_e_c},
          {"delta_e_l_mev", dot.delta_e_l},
          {"deg1", dot.deg1},
          {"deg2", dot.deg2},
          {"sigma1_nm2", dot.sigma1}}},
        {"mu_source", mu_source == ensemble::MuSource::kOracle ? "oracle" : "sommerfeld"},
        {"temperature_k", temperature},
        {"attempt_rate_hz", attempt_rate},
        {"transitions", transitions},
        {"trace",
         {{"sample_rate_hz", trace.sample_rate},
          {"current_1_a", trace.current_1},
          {"current_2_a", trace.current_2},
          {"noise_sigma_a", trace.noise_sigma}}},
        {"estimator", {{"divergence_floor", divergence_floor}}},
        {"seed", seed},
    };
    json det = {{"min_dwell_samples", min_dwell_samples}, {"threshold_sigmas", threshold_sigmas}};
    if (detection) {
        det["threshold_low_a"] = detection->threshold_low;
        det["threshold_high_a"] = detection->threshold_high;
        det["high_state"] = detection->high_state;
    }
    j["detection"] = det;
    if (fano_window) j["estimator"]["fano_window_s"] = *fano_window;
    if (!output_dir.empty()) j["output_dir"] = output_dir;
    return j;
}

void RunConfig::validate() const {
    as_config_error([&] {
        constants.validate();
        reservoir.validate();
        dot.validate();
        trace.validate();
        if (detection) detection->validate();
    });
    if (!(std::isfinite(temperature) && temperature > 0)) {
        throw ConfigError("temperature_k: must be > 0");
    }
    if (!(std::isfinite(attempt_rate) && attempt_rate > 0)) {
        throw ConfigError("attempt_rate_hz: must be > 0");
    }
    if (transitions < 1) throw ConfigError("transitions: must be >= 1");
    if (!(threshold_sigmas >= 0)) throw ConfigError("detection.threshold_sigmas: must be >= 0");
    if (min_dwell_samples < 1) throw ConfigError("detection.min_dwell_samples: must be >= 1");
    if (!(divergence_floor >= 0)) throw ConfigError("estimator.divergence_floor: must be >= 0");
    if (fano_window && !(*fano_window > 0)) {
        throw ConfigError("estimator.fano_window_s: must be > 0");
    }
    if (!detection) {
        const double gap = std::abs(trace.current_1 - trace.current_2);
        if (2.0 * threshold_sigmas * trace.noise_sigma >= gap) {
            throw ConfigError(
                "detection.threshold_sigmas: derived thresholds cross; reduce threshold_sigmas "
                "or trace.noise_sigma_a");
        }
    }
}

ensemble::EnsembleParams RunConfig::params() const {
    auto p = ensemble::EnsembleParams::at(device(), temperature);
    p.mu_source = mu_source;
    return p;
}

estimator::DetectionConfig RunConfig::detection_for(const rts::TraceConfig& tc) const {
    if (detection) return *detection;
    return estimator::DetectionConfig::from_levels(tc.current_1, tc.current_2, tc.noise_sigma,
                                                   threshold_sigmas, min_dwell_samples);
}

RunConfig load_config(const std::string& path) {
    const std::string text = io::read_text_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return RunConfig::from_json(j);
}

}  // namespace qdtherm::cli
