// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qdtherm/cli/commands.hpp"
#include "qdtherm/cli/config.hpp"
#include "qdtherm/ensemble.hpp"
#include "qdtherm/estimator.hpp"
#include "qdtherm/fermi2d.hpp"
#include "qdtherm/io.hpp"
#include "qdtherm/rts_sim.hpp"
#include "support.hpp"

namespace {

using namespace qdtherm;
using testing::Draw;
using testing::rel_err;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

int failures = 0;

void criterion(int id, const char* name, double time_limit_s, const std::function<Verdict()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (time_limit_s > 0 && elapsed > time_limit_s) {
        v.pass = false;
        v.detail += fmt("; runtime %.3f s exceeds %.0f s", elapsed, time_limit_s);
    }
    if (!v.pass) ++failures;
    std::printf("%s [%d] %s: %s (%.3f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(),
                elapsed);
    std::fflush(stdout);
}

constexpr int kDraws = 10000;
constexpr std::uint64_t kDrawSeed = 20240601;

Verdict normalization() {
    Draw d(kDrawSeed);
    double worst = 0;
    for (int i = 0; i < kDraws; ++i) {
        const auto p = testing::random_params(d);
        const auto occ = ensemble::occupation_probability(p);
        worst = std::max(worst, std::abs(occ.p1 + occ.p2 - 1.0));
    }
    return {worst <= 1e-12, fmt("max |p1+p2-1| = %.3g over %.0f draws (tol 1e-12)", worst, kDraws)};
}

Verdict closed_form_equivalence() {
    Draw d(kDrawSeed);
    double worst = 0;
    for (int i = 0; i < kDraws; ++i) {
        const auto p = testing::random_params(d);
        const double via_weights = ensemble::weight(p, 1).log - ensemble::weight(p, 2).log;
        const double closed = ensemble::occupation_ratio(p).log;
        worst = std::max(worst, std::abs(std::expm1(via_weights - closed)));
    }
    return {worst <= 1e-12, fmt("max relative ratio gap = %.3g (tol 1e-12)", worst)};
}

// Defaults at 300 K: beta mu 3 / (2 N2) <= 0.023 over the sweep, so the gap is
// in its 1/N2 regime from the first point.
Verdict limit_recovery() {
    auto config = cli::RunConfig::defaults();
    config.temperature = 300.0;
    const auto sweep = cli::limit_sweep(config, cli::parse_range("100:1000000:5"), true);
    const bool ok = sweep.rows.size() == 5 && std::abs(sweep.slope + 1.0) <= 0.02;
    return {ok, fmt("slope = %.5f over N2 = 1e2..1e6 at fixed density (target -1 +- 0.02)",
                    sweep.slope)};
}

Verdict sommerfeld_validity() {
    const PhysicalConstants c;
    const auto config = cli::RunConfig::defaults();
    const double m = double(config.reservoir.n2);
    const double a = config.reservoir.sigma2;
    const double g = config.reservoir.g;
    const double mu_f = fermi2d::chemical_potential(m, a, g);
    double worst = 0;
    for (double ratio : {0.001, 0.002, 0.005, 0.01, 0.02, 0.03, 0.04, 0.05}) {
        const double t = ratio * mu_f / c.k_b;
        const auto oracle = fermi2d::fd_oracle(m, a, g, t, c);
        worst = std::max(worst,
                         std::abs(fermi2d::internal_energy(m, a, g, t, c) - oracle.u_exact) /
                             oracle.u_exact);
    }
    // Order from a DOS with curvature: constant g has no (k_B T)^4 term at all.
    const fermi2d::PolynomialDos dos({1e-3, 1e-4, 1e-5});
    const double mu = 10.0;
    std::vector<double> xs, ys;
    for (double ratio = 0.005; ratio <= 0.0501; ratio *= std::pow(10.0, 0.125)) {
        const double t = ratio * mu / c.k_b;
        const double exact = fermi2d::fd_energy_density(dos, mu, t, c);
        xs.push_back(ratio);
        ys.push_back(std::abs(fermi2d::sommerfeld_expansion(dos, mu, t, c).u - exact) / exact);
    }
    const double order = cli::loglog_slope(xs, ys);
    const bool ok = worst <= 1e-3 && order >= 3.5;
    return {ok, fmt("max |dU|/U = %.3g for kT/mu_F <= 0.05 (tol 1e-3); order = %.3f (>= 3.5)",
                    worst, order)};
}

Verdict thermodynamic_identities() {
    const PhysicalConstants c;
    Draw d(kDrawSeed + 5);
    double worst_s = 0, worst_p = 0, worst_c = 0;
    for (int i = 0; i < 1000; ++i) {
        const double a = d.log_uniform(10, 1e6);
        const double g = d.log_uniform(1e-5, 1e-1);
        const double mu = d.log_uniform(0.1, 200);
        const double t = mu * d.log_uniform(1e-3, 1.0) / c.k_b;
        const double m = g * a * mu;
        // Psi and U are quadratic in T: the wide step is exact up to rounding.
        const double ht = 0.5 * t;
        const double ha = 1e-4 * a;
        const double ds =
            -(fermi2d::helmholtz(m, a, g, t + ht) - fermi2d::helmholtz(m, a, g, t - ht)) / (2 * ht);
        const double dp =
            -(fermi2d::helmholtz(m, a + ha, g, t) - fermi2d::helmholtz(m, a - ha, g, t)) / (2 * ha);
        const double dc = (fermi2d::internal_energy(m, a, g, t + ht) -
                           fermi2d::internal_energy(m, a, g, t - ht)) /
                          (2 * ht * a);
        worst_s = std::max(worst_s, rel_err(ds, fermi2d::entropy(m, a, g, t)));
        worst_p = std::max(worst_p, rel_err(dp, fermi2d::pressure(m, a, g, t)));
        worst_c = std::max(worst_c, rel_err(dc, fermi2d::heat_capacity_per_area(g, t)));
    }
    const bool ok = worst_s <= 1e-6 && worst_p <= 1e-6 && worst_c <= 1e-6;
    return {ok, fmt("max rel err S %.2g, P %.2g, c_A %.2g on 1000 points (tol 1e-6)", worst_s,
                    worst_p, worst_c)};
}

Verdict identifiability() {
    Draw d(kDrawSeed + 6);
    double worst = 0;
    int nonphysical = 0;
    for (int i = 0; i < kDraws; ++i) {
        const auto p = testing::random_params(d, 0.05, 300.0, 0.1, 50.0);
        const auto inv = estimator::invert_log_ratio_for_temperature(
            ensemble::occupation_ratio(p).log, p.device());
        if (!inv.physical) {
            ++nonphysical;
            continue;
        }
        worst = std::max(worst, rel_err(inv.raw, p.temperature));
    }
    const bool ok = worst <= 1e-9 && nonphysical == 0;
    return {ok, fmt("max rel err %.3g over %.0f draws, %.0f non-physical (tol 1e-9)", worst,
                    kDraws, nonphysical)};
}

Verdict round_trip() {
    const auto config = cli::RunConfig::defaults();
    const auto frozen = cli::roundtrip_once(config, config.seed);
    const double frozen_err = std::abs(frozen.estimate.t_hat - frozen.t_true) / frozen.t_true;
    std::vector<cli::RoundTrip> runs;
    for (std::uint64_t s = 1; s <= 100; ++s) runs.push_back(cli::roundtrip_once(config, s));
    const auto summary = cli::summarize(runs);
    const std::size_t covered = std::size_t(std::lround(summary.coverage_3sigma * summary.valid));
    const bool ok = frozen.estimate.valid && frozen_err <= 0.03 && summary.valid == 100 &&
                    covered >= 95 && std::abs(summary.mean_z) <= 0.3 && summary.std_z >= 0.7 &&
                    summary.std_z <= 1.3;
    std::string detail = fmt("seed 1: T_hat = %.4f K, rel err %.4f (tol 0.03); ",
                             frozen.estimate.t_hat, frozen_err);
    detail += fmt("3-sigma coverage %.0f/100 (>= 95); z mean %.3f, std %.3f", double(covered),
                  summary.mean_z, summary.std_z);
    return {ok, detail};
}

Verdict ergodicity() {
    const auto config = cli::RunConfig::defaults();
    const auto sim = cli::simulate(config);
    const double p1 = ensemble::occupation_probability(config.params()).p1;
    const double f1_events = estimator::occupancy_fraction(sim.events).f1;
    std::size_t high = 0;
    const double mid = 0.5 * (config.trace.current_1 + config.trace.current_2);
    for (double s : sim.trace.samples) high += s > mid;
    const double sigma = estimator::occupancy_fraction_sigma(sim.rates, sim.events.total_time);
    const double z = (f1_events - p1) / sigma;
    return {std::abs(z) <= 3.0,
            fmt("f1 = %.5f (sample fraction above mid-level %.5f), p1 = %.5f, z = %.2f (|z| <= 3)",
                f1_events, double(high) / double(sim.trace.samples.size()), p1, z)};
}

Verdict poissonianity() {
    // Equal dwell means: the renewal Fano factor of the transition count is 1.
    const auto model = rts::dwell_means_from_ratio(1.0, 1e3);
    const auto events = rts::simulate_events(model, 100000, 9);
    const auto d1 = estimator::complete_dwells(events, 1);
    const auto d2 = estimator::complete_dwells(events, 2);
    const auto ks1 = estimator::ks_exponential(d1);
    const auto ks2 = estimator::ks_exponential(d2);
    const double window = 10.0 * (model.tau1_mean + model.tau2_mean);
    const double k = std::floor(events.total_time / window);
    const double mean_count = window / model.tau1_mean;
    const double fano = estimator::fano_factor(events, window);
    // Sampling sd of a variance-to-mean ratio over k windows of near-Poisson counts.
    const double sigma = std::sqrt(2.0 / (k - 1) + 1.0 / (k * mean_count));
    const double z = (fano - 1.0) / sigma;
    const bool ok = ks1.p_value > 0.01 && ks2.p_value > 0.01 && std::abs(z) <= 3.0;
    return {ok, fmt("KS p = %.3f / %.3f (alpha 0.01); Fano = %.4f, z = %.2f (|z| <= 3)",
                    ks1.p_value, ks2.p_value, fano, z)};
}

Verdict determinism() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "qdtherm_acceptance_determinism";
    fs::remove_all(dir);
    const std::string out = dir.string();
    const auto run = [&](std::vector<std::string> args, std::string& stdout_text) {
        args.insert(args.begin(), "qdtherm");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream o, e;
        const int code = cli::run(int(argv.size()), argv.data(), o, e);
        stdout_text = o.str();
        return code;
    };
    const auto snapshot = [&] {
        std::string s;
        for (const char* f : {"trace.csv", "trace.json", "events.csv"}) {
            s += io::read_text_file(dir / f);
        }
        return s;
    };
    std::string o1, o2, r1, r2;
    if (run({"simulate", "--seed", "7", "--out", out}, o1) != 0) return {false, "simulate failed"};
    const std::string sim1 = snapshot();
    if (run({"simulate", "--seed", "7", "--out", out}, o2) != 0) return {false, "simulate failed"};
    const std::string sim2 = snapshot();
    if (run({"roundtrip", "--seed", "7", "--repeats", "3"}, r1) != 0 ||
        run({"roundtrip", "--seed", "7", "--repeats", "3"}, r2) != 0) {
        return {false, "roundtrip failed"};
    }
    fs::remove_all(dir);
    const bool ok = sim1 == sim2 && o1 == o2 && r1 == r2;
    std::string detail = std::string("simulate outputs ") + (sim1 == sim2 ? "identical" : "differ");
    detail += fmt(" (%.0f bytes), ", double(sim1.size()));
    detail += std::string("roundtrip report ") + (r1 == r2 ? "identical" : "differs");
    return {ok, detail};
}

}  // namespace

int main() {
    criterion(1, "normalization", 1.0, normalization);
    criterion(2, "closed-form equivalence", 0, closed_form_equivalence);
    criterion(3, "limit recovery", 1.0, limit_recovery);
    criterion(4, "Sommerfeld validity", 10.0, sommerfeld_validity);
    criterion(5, "thermodynamic identities", 0, thermodynamic_identities);
    criterion(6, "temperature identifiability", 0, identifiability);
    criterion(7, "end-to-end round trip", 60.0, round_trip);
    criterion(8, "ergodicity", 0, ergodicity);
    criterion(9, "Poissonianity", 0, poissonianity);
    criterion(10, "determinism", 0, determinism);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
