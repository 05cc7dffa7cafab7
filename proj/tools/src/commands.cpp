#include "qdtherm/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "qdtherm/ensemble.hpp"
#include "qdtherm/fermi2d.hpp"
#include "qdtherm/io.hpp"
#include "qdtherm/random.hpp"

namespace qdtherm::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json log_real_json(const ensemble::LogReal& r) {
    return r.representable() ? json(r.value()) : json(nullptr);
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "";
    if (v.is_number_float()) return io::format_double(v.get<double>());
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

std::string csv_table(const std::vector<std::string>& columns, const json& rows) {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            os << (i ? "," : "") << csv_cell(row.at(columns[i]));
        }
        os << '\n';
    }
    return os.str();
}

void flatten(const json& j, const std::string& prefix, json& rows) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
    } else if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) {
            flatten(j[i], prefix + "." + std::to_string(i), rows);
        }
    } else {
        rows.push_back({{"quantity", prefix}, {"value", j}});
    }
}

std::string key_value_csv(const json& report) {
    json rows = json::array();
    flatten(report, "", rows);
    return csv_table({"quantity", "value"}, rows);
}

fs::path ensure_dir(const std::string& dir) {
    const fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) {
        throw io::IoError("cannot create output directory '" + p.string() + "'");
    }
    return p;
}

void emit(std::ostream& out, const OutputOptions& opts, const std::string& basename,
          const std::string& text) {
    out << text;
    if (!opts.out_dir.empty()) {
        const auto dir = ensure_dir(opts.out_dir);
        const char* ext = opts.format == Format::kCsv ? ".csv" : ".json";
        io::write_text_file(dir / (basename + ext), text);
    }
}

std::string render(const json& report, const OutputOptions& opts,
                   const std::vector<std::string>& columns = {}, const char* rows_key = "rows") {
    if (opts.format == Format::kJson) return report.dump(2) + "\n";
    if (!columns.empty()) return csv_table(columns, report.at(rows_key));
    return key_value_csv(report);
}

}  // namespace

std::vector<double> Range::linear() const {
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
    }
    return xs;
}

std::vector<double> Range::logarithmic() const {
    std::vector<double> xs(n);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = n == 1 ? lo : std::exp(a + (b - a) * double(i) / double(n - 1));
    }
    return xs;
}

Range parse_range(const std::string& text) {
    std::string body = text;
    if (const auto eq = body.find('='); eq != std::string::npos) body = body.substr(eq + 1);
    Range r;
    char c1 = 0;
    char c2 = 0;
    long long n = 0;
    std::istringstream is(body);
    if (!(is >> r.lo >> c1 >> r.hi >> c2 >> n) || c1 != ':' || c2 != ':' || n < 1 ||
        !(is >> std::ws).eof()) {
        throw ConfigError("range '" + text + "': expected lo:hi:n with n >= 1");
    }
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        throw ConfigError("range '" + text + "': bounds must be finite");
    }
    r.n = std::size_t(n);
    return r;
}

Simulation simulate(const RunConfig& config) {
    config.validate();
    Simulation sim;
    const auto ratio = ensemble::occupation_ratio(config.params());
    sim.log_ratio = ratio.log;
    sim.rates = rts::dwell_means_from_ratio(ratio.value(), config.attempt_rate);
    sim.events = rts::simulate_events(sim.rates, config.transitions, config.seed);
    sim.trace_config = config.trace;
    sim.trace_config.seed = mix_seed(config.seed);
    sim.trace = rts::render_trace(sim.events, sim.trace_config);
    return sim;
}

json sidecar_json(const RunConfig& config, const Simulation& sim) {
    return {
        {"format", io::kSidecarFormat},
        {"generator", std::string(Rng::kId)},
        {"seed", config.seed},
        {"config", config.to_json()},
        {"log_ratio", sim.log_ratio},
        {"rates", {{"tau1_mean_s", sim.rates.tau1_mean}, {"tau2_mean_s", sim.rates.tau2_mean}}},
        {"trace", io::trace_config_json(sim.trace_config)},
        {"t0_s", sim.trace.t0},
        {"dt_s", sim.trace.dt},
        {"samples", sim.trace.samples.size()},
        {"sub_sample_dwells", sim.trace.sub_sample_dwells},
        {"truth", io::dwell_summary_json(sim.events)},
    };
}

Analysis analyze_trace(const rts::SampledTrace& trace, const RunConfig& config,
                       const estimator::DetectionConfig& detection) {
    Analysis a;
    a.detection = detection;
    a.detected = estimator::detect_states(trace, detection);
    if (!a.detected.ok()) {
        a.estimate.reason = "detection failed: " + a.detected.diagnostic;
        return a;
    }
    const auto& events = a.detected.events;
    a.fractions = estimator::occupancy_fraction(events);
    a.stats = estimator::dwell_statistics(events);
    a.fano_window = config.fano_window.value_or(
        std::min(10.0 * (a.stats->tau1_hat + a.stats->tau2_hat), events.total_time / 10.0));
    try {
        a.fano = estimator::fano_factor(events, a.fano_window);
    } catch (const DomainError&) {
        a.fano.reset();
    }
    estimator::EstimatorOptions opts;
    opts.divergence_floor = config.divergence_floor;
    a.estimate = estimator::estimate_temperature(*a.stats, config.device(), opts);
    return a;
}

json analysis_json(const Analysis& a, const json& inputs_echo) {
    json j;
    if (a.stats) {
        j["tau1_hat"] = a.stats->tau1_hat;
        j["tau2_hat"] = a.stats->tau2_hat;
        j["n1"] = a.stats->n1_events;
        j["n2"] = a.stats->n2_events;
    } else {
        j["tau1_hat"] = nullptr;
        j["tau2_hat"] = nullptr;
        j["n1"] = 0;
        j["n2"] = 0;
    }
    j["fano"] = a.fano ? json(*a.fano) : json(nullptr);
    j["fano_window_s"] = a.fano_window;
    j["f1"] = a.fractions.f1;
    j["f2"] = a.fractions.f2;
    j["t_hat"] = nullable(a.estimate.t_hat);
    j["sigma_t"] = nullable(a.estimate.sigma_t);
    j["valid"] = a.estimate.valid;
    j["reason"] = a.estimate.reason;
    j["detected_transitions"] = a.detected.events.transitions();
    j["merged_runs"] = a.detected.merged_runs;
    j["inputs_echo"] = inputs_echo;
    j["inputs_echo"]["detection_used"] = {{"threshold_low_a", a.detection.threshold_low},
                                          {"threshold_high_a", a.detection.threshold_high},
                                          {"min_dwell_samples", a.detection.min_dwell_samples},
                                          {"high_state", a.detection.high_state}};
    return j;
}

RoundTrip roundtrip_once(const RunConfig& config, std::uint64_t seed) {
    RunConfig c = config;
    c.seed = seed;
    const Simulation sim = simulate(c);
    const Analysis a = analyze_trace(sim.trace, c, c.detection_for(sim.trace_config));
    RoundTrip r;
    r.seed = seed;
    r.t_true = c.temperature;
    r.estimate = a.estimate;
    r.true_transitions = sim.events.transitions();
    r.detected_transitions = a.detected.events.transitions();
    return r;
}

RoundTripSummary summarize(const std::vector<RoundTrip>& runs) {
    RoundTripSummary s;
    s.runs = runs.size();
    std::vector<double> zs;
    std::size_t covered = 0;
    for (const auto& r : runs) {
        if (!r.estimate.valid || !(r.estimate.sigma_t > 0)) continue;
        zs.push_back(r.z());
        if (std::abs(r.z()) <= 3.0) ++covered;
        s.max_abs_rel_error =
            std::max(s.max_abs_rel_error, std::abs(r.estimate.t_hat - r.t_true) / r.t_true);
    }
    s.valid = zs.size();
    if (!zs.empty()) {
        s.mean_z = std::accumulate(zs.begin(), zs.end(), 0.0) / double(zs.size());
        double acc = 0.0;
        for (double z : zs) acc += (z - s.mean_z) * (z - s.mean_z);
        s.std_z = zs.size() > 1 ? std::sqrt(acc / double(zs.size() - 1)) : 0.0;
        s.coverage_3sigma = double(covered) / double(zs.size());
    }
    return s;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() < 2 || x.size() != y.size()) return std::nan("");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= double(x.size());
    my /= double(x.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

LimitSweep limit_sweep(const RunConfig& config, const Range& n2_range, bool fixed_density) {
    config.validate();
    if (!(n2_range.lo >= 1 && n2_range.hi >= n2_range.lo)) {
        throw ConfigError("n2 range: need 1 <= lo <= hi");
    }
    const double density = double(config.reservoir.n2) / config.reservoir.sigma2;
    LimitSweep sweep;
    std::vector<double> xs;
    std::vector<double> gaps;
    for (double v : n2_range.logarithmic()) {
        auto p = config.params();
        p.reservoir.n2 = std::int64_t(std::llround(v));
        if (fixed_density) p.reservoir.sigma2 = double(p.reservoir.n2) / density;
        LimitRow row;
        row.n2 = p.reservoir.n2;
        row.sigma2 = p.reservoir.sigma2;
        row.mu = p.mu();
        row.log_ratio = ensemble::occupation_ratio(p).log;
        row.log_ratio_infinite = ensemble::infinite_reservoir_ratio(p).log;
        row.gap = std::abs(std::expm1(row.log_ratio - row.log_ratio_infinite));
        sweep.rows.push_back(row);
        xs.push_back(double(row.n2));
        gaps.push_back(row.gap);
    }
    sweep.slope = loglog_slope(xs, gaps);
    return sweep;
}

namespace {

json limit_rows_json(const LimitSweep& sweep) {
    json rows = json::array();
    for (const auto& r : sweep.rows) {
        rows.push_back({{"n2", r.n2},
                        {"sigma2_nm2", r.sigma2},
                        {"mu_mev", r.mu},
                        {"ratio", log_real_json({r.log_ratio})},
                        {"ratio_infinite", log_real_json({r.log_ratio_infinite})},
                        {"log_ratio", r.log_ratio},
                        {"log_ratio_infinite", r.log_ratio_infinite},
                        {"gap", r.gap}});
    }
    return rows;
}

const std::vector<std::string> kLimitColumns = {"n2",    "sigma2_nm2",     "mu_mev",
                                                "ratio", "ratio_infinite", "gap"};

}  // namespace

int cmd_thermo(const RunConfig& config, const std::optional<Range>& t_sweep,
               const OutputOptions& opts, std::ostream& out) {
    config.validate();
    std::vector<double> temps = t_sweep ? t_sweep->linear() : std::vector<double>{config.temperature};
    const double m = double(config.reservoir.n2);
    const double area = config.reservoir.sigma2;
    const double g = config.reservoir.g;
    json rows = json::array();
    for (double t : temps) {
        if (!(std::isfinite(t) && t >= 0)) throw ConfigError("--sweep: temperatures must be >= 0");
        const auto tp = fermi2d::thermo_point(m, area, g, t, config.constants);
        json row = {{"T_k", t},       {"mu_mev", tp.mu},       {"u_mev", tp.u},
                    {"psi_mev", tp.psi}, {"s_mev_per_k", tp.s}, {"c_a", tp.c_a},
                    {"p_mev_per_nm2", tp.p}, {"kt_over_mu", config.constants.k_b * t / tp.mu}};
        if (t > 0) {
            const auto oracle = fermi2d::fd_oracle(m, area, g, t, config.constants);
            row["mu_oracle_mev"] = oracle.mu_exact;
            row["u_oracle_mev"] = oracle.u_exact;
            row["u_rel_gap"] = std::abs(tp.u - oracle.u_exact) / oracle.u_exact;
        } else {
            row["mu_oracle_mev"] = nullptr;
            row["u_oracle_mev"] = nullptr;
            row["u_rel_gap"] = nullptr;
        }
        rows.push_back(row);
    }
    const json report = {{"inputs", config.to_json()}, {"rows", rows}};
    emit(out, opts, "thermo",
         render(report, opts,
                {"T_k", "mu_mev", "u_mev", "psi_mev", "s_mev_per_k", "c_a", "p_mev_per_nm2",
                 "mu_oracle_mev", "u_oracle_mev", "u_rel_gap", "kt_over_mu"}));
    return kExitOk;
}

int cmd_ratio(const RunConfig& config, const std::optional<Range>& n2_sweep,
              const OutputOptions& opts, std::ostream& out) {
    config.validate();
    const auto p = config.params();
    const auto probs = ensemble::occupation_probability(p);
    const auto ratio = ensemble::occupation_ratio(p);
    const auto ratio_inf = ensemble::infinite_reservoir_ratio(p);
    const auto z = ensemble::partition_qg(p);
    const auto area = ensemble::consistent_island_area(p);
    const double x = ensemble::effective_energy_gap(p);
    json report = {
        {"inputs", config.to_json()},
        {"x_mev", x},
        {"beta_x", p.beta() * x},
        {"mu_mev", p.mu()},
        {"p1", probs.p1},
        {"p2", probs.p2},
        {"ratio", log_real_json(ratio)},
        {"log_ratio", ratio.log},
        {"ratio_infinite", log_real_json(ratio_inf)},
        {"log_ratio_infinite", ratio_inf.log},
        {"log_z_qg", z.log},
        {"state_equation_residual", ensemble::state_equation_residual(p)},
        {"sigma1_star_nm2", area.sigma1 ? json(*area.sigma1) : json(nullptr)},
        {"sigma1_star_diagnostic", area.diagnostic},
    };
    if (n2_sweep) {
        const auto sweep = limit_sweep(config, *n2_sweep, true);
        report["n2_sweep"] = {{"rows", limit_rows_json(sweep)}, {"slope", nullable(sweep.slope)}};
    }
    emit(out, opts, "ratio", render(report, opts));
    return kExitOk;
}

int cmd_simulate(const RunConfig& config, const OutputOptions& opts, std::ostream& out) {
    const Simulation sim = simulate(config);
    const auto dir = ensure_dir(opts.out_dir.empty() ? config.output_dir : opts.out_dir);
    const fs::path trace_path = dir / "trace.csv";
    {
        std::ostringstream os;
        io::write_trace_csv(os, sim.trace);
        io::write_text_file(trace_path, os.str());
    }
    {
        std::ostringstream os;
        io::write_events_csv(os, sim.events);
        io::write_text_file(dir / "events.csv", os.str());
    }
    const json sidecar = sidecar_json(config, sim);
    io::write_text_file(io::sidecar_path(trace_path), sidecar.dump(2) + "\n");
    const json summary = {{"trace", trace_path.string()},
                          {"sidecar", io::sidecar_path(trace_path).string()},
                          {"events", (dir / "events.csv").string()},
                          {"samples", sim.trace.samples.size()},
                          {"transitions", sim.events.transitions()},
                          {"truth", sidecar.at("truth")}};
    out << (opts.format == Format::kJson ? summary.dump(2) + "\n" : key_value_csv(summary));
    return kExitOk;
}

int cmd_analyze(const std::string& trace_path, const RunConfig& config,
                const OutputOptions& opts, std::ostream& out) {
    config.validate();
    std::optional<json> sidecar;
    const fs::path side = io::sidecar_path(trace_path);
    if (fs::exists(side)) {
        try {
            sidecar = json::parse(io::read_text_file(side));
        } catch (const json::parse_error& e) {
            throw io::ParseError(side.string(), 1, e.what());
        }
    }
    std::optional<double> dt;
    estimator::DetectionConfig detection;
    try {
        if (sidecar && sidecar->contains("dt_s")) dt = sidecar->at("dt_s").get<double>();
        if (config.detection) {
            detection = *config.detection;
        } else if (sidecar && sidecar->contains("trace")) {
            const auto& t = sidecar->at("trace");
            rts::TraceConfig tc;
            tc.current_1 = t.at("current_1_a").get<double>();
            tc.current_2 = t.at("current_2_a").get<double>();
            tc.noise_sigma = t.at("noise_sigma_a").get<double>();
            detection = config.detection_for(tc);
        } else {
            throw ConfigError(
                "detection: no thresholds in config and no sidecar with trace levels next to '" +
                trace_path + "'");
        }
    } catch (const json::exception& e) {
        throw io::ParseError(side.string(), 1, std::string("sidecar schema: ") + e.what());
    }

    std::ifstream is(trace_path, std::ios::binary);
    if (!is) throw io::IoError("cannot open '" + trace_path + "' for reading");
    const auto trace = io::read_trace_csv(is, trace_path, dt);

    const Analysis a = analyze_trace(trace, config, detection);
    json echo = {{"trace_path", trace_path}, {"config", config.to_json()}};
    if (sidecar) echo["sidecar"] = *sidecar;
    const json results = analysis_json(a, echo);
    const std::string text = results.dump(2) + "\n";
    out << text;
    if (!opts.out_dir.empty()) {
        io::write_text_file(ensure_dir(opts.out_dir) / "results.json", text);
    }
    if (!a.detected.ok()) return kExitNumerical;
    return kExitOk;
}

int cmd_roundtrip(const RunConfig& config, std::size_t repeats, const OutputOptions& opts,
                  std::ostream& out) {
    config.validate();
    if (repeats < 1) throw ConfigError("--repeats: must be >= 1");
    std::vector<RoundTrip> runs;
    runs.reserve(repeats);
    for (std::size_t i = 0; i < repeats; ++i) runs.push_back(roundtrip_once(config, config.seed + i));
    const auto s = summarize(runs);
    json rows = json::array();
    for (const auto& r : runs) {
        rows.push_back({{"seed", r.seed},
                        {"t_true", r.t_true},
                        {"t_hat", nullable(r.estimate.t_hat)},
                        {"sigma_t", nullable(r.estimate.sigma_t)},
                        {"z", r.estimate.valid ? nullable(r.z()) : json(nullptr)},
                        {"valid", r.estimate.valid},
                        {"reason", r.estimate.reason},
                        {"true_transitions", r.true_transitions},
                        {"detected_transitions", r.detected_transitions}});
    }
    const json report = {{"inputs", config.to_json()},
                         {"runs", rows},
                         {"summary",
                          {{"runs", s.runs},
                           {"valid", s.valid},
                           {"mean_z", s.mean_z},
                           {"std_z", s.std_z},
                           {"coverage_3sigma", s.coverage_3sigma},
                           {"max_abs_rel_error", s.max_abs_rel_error}}}};
    emit(out, opts, "roundtrip",
         render(report, opts,
                {"seed", "t_true", "t_hat", "sigma_t", "z", "valid", "true_transitions",
                 "detected_transitions"},
                "runs"));
    return kExitOk;
}

int cmd_limit_sweep(const RunConfig& config, const Range& n2_range, bool fixed_density,
                    const OutputOptions& opts, std::ostream& out) {
    const auto sweep = limit_sweep(config, n2_range, fixed_density);
    const json report = {{"inputs", config.to_json()},
                         {"fixed", fixed_density ? "density" : "area"},
                         {"rows", limit_rows_json(sweep)},
                         {"slope", nullable(sweep.slope)}};
    std::string text = render(report, opts, kLimitColumns);
    if (opts.format == Format::kCsv) text += "# slope," + io::format_double(sweep.slope) + "\n";
    emit(out, opts, "limit_sweep", text);
    return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"qdtherm: finite-reservoir ensemble, telegraph simulation and thermometry"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format = "json";
    std::optional<double> temperature;
    std::optional<std::size_t> transitions;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON configuration file")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Random seed (overrides config)");
        sub->add_option("--out", out_dir, "Output directory (overrides config)");
        sub->add_option("--format", format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--temperature", temperature, "Temperature in K (overrides config)");
        sub->add_option("--transitions", transitions, "Transitions to simulate (overrides config)");
    };

    auto* thermo = app.add_subcommand("thermo", "2D reservoir thermodynamics and FD oracle");
    std::string sweep_text;
    thermo->add_option("--sweep", sweep_text, "Temperature sweep T=lo:hi:n");
    add_common(thermo);

    auto* ratio = app.add_subcommand("ratio", "Occupation probabilities and ratio");
    std::string n2_sweep_text;
    ratio->add_option("--n2-sweep", n2_sweep_text, "N2 sweep lo:hi:n (log spaced, fixed density)");
    add_common(ratio);

    auto* simulate_cmd = app.add_subcommand("simulate", "Write a telegraph trace and sidecar");
    add_common(simulate_cmd);

    auto* analyze = app.add_subcommand("analyze", "Estimate temperature from a trace CSV");
    std::string trace_path;
    analyze->add_option("trace", trace_path, "Trace CSV")->required();
    add_common(analyze);

    auto* roundtrip = app.add_subcommand("roundtrip", "Simulate, analyze, compare");
    long long repeats = 1;
    roundtrip->add_option("--repeats", repeats, "Number of seeds (seed, seed+1, ...)");
    add_common(roundtrip);

    auto* limit = app.add_subcommand("limit-sweep", "Finite vs infinite reservoir ratio");
    std::string limit_text = "100:1000000:5";
    bool fixed_area = false;
    limit->add_option("--n2", limit_text, "N2 range lo:hi:n (log spaced)");
    limit->add_flag("--fixed-area", fixed_area, "Hold Sigma2 fixed instead of N2/Sigma2");
    add_common(limit);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        RunConfig config = config_path.empty() ? RunConfig::defaults() : load_config(config_path);
        if (seed) config.seed = *seed;
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (temperature) config.temperature = *temperature;
        if (transitions) config.transitions = *transitions;
        config.validate();

        OutputOptions opts;
        opts.format = format == "csv" ? Format::kCsv : Format::kJson;
        opts.out_dir = out_dir.empty() ? config.output_dir : out_dir;

        if (thermo->parsed()) {
            std::optional<Range> sweep;
            if (!sweep_text.empty()) {
                if (sweep_text.rfind("T=", 0) != 0) {
                    throw ConfigError("--sweep: only temperature sweeps (T=lo:hi:n) are supported");
                }
                sweep = parse_range(sweep_text);
            }
            return cmd_thermo(config, sweep, opts, out);
        }
        if (ratio->parsed()) {
            std::optional<Range> sweep;
            if (!n2_sweep_text.empty()) sweep = parse_range(n2_sweep_text);
            return cmd_ratio(config, sweep, opts, out);
        }
        if (simulate_cmd->parsed()) return cmd_simulate(config, opts, out);
        if (analyze->parsed()) {
            if (opts.format == Format::kCsv) throw ConfigError("--format: analyze writes JSON only");
            return cmd_analyze(trace_path, config, opts, out);
        }
        if (roundtrip->parsed()) {
            if (repeats < 1) throw ConfigError("--repeats: must be >= 1");
            return cmd_roundtrip(config, std::size_t(repeats), opts, out);
        }
        if (limit->parsed()) return cmd_limit_sweep(config, parse_range(limit_text), !fixed_area, opts, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const io::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const io::IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const estimator::InsufficientStatistics& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitValidation;
}

}  // namespace qdtherm::cli
