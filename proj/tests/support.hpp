#pragma once

// Shared helpers for the test suites.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "qdtherm/ensemble.hpp"
#include "qdtherm/fermi2d.hpp"

namespace qdtherm::testing {

inline double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Uniform in [lo, hi) and log-uniform helpers over a fixed engine.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * double(engine_() >> 11) * 0x1.0p-53;
    }
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return lo + std::int64_t(engine_() % std::uint64_t(hi - lo + 1));
    }

private:
    std::mt19937_64 engine_;
};

/// A random valid ensemble at a random temperature with |beta X| in
/// [bx_lo, bx_hi] and random sign.
inline ensemble::EnsembleParams random_params(Draw& d, double t_lo = 0.05, double t_hi = 300.0,
                                              double bx_lo = 0.1, double bx_hi = 50.0) {
    ensemble::EnsembleParams p;
    p.reservoir.n2 = d.integer(1, 100000);
    p.reservoir.g = d.log_uniform(1e-4, 1e-2);
    p.temperature = d.log_uniform(t_lo, t_hi);
    const double kt = p.constants.k_b * p.temperature;
    // Keep beta mu moderate so the individual log-weights stay well conditioned.
    const double mu = kt * d.log_uniform(1e-3, 50.0);
    p.reservoir.sigma2 = double(p.reservoir.n2) / (p.reservoir.g * mu);
    p.dot.deg1 = int(d.integer(1, 4));
    p.dot.deg2 = int(d.integer(1, 4));
    p.dot.delta_e_c = kt * d.uniform(0.0, 10.0);
    p.dot.delta_e_l = kt * d.uniform(-2.0, 5.0);
    p.dot.sigma1 = d.uniform(0.0, 50.0);
    const double bx = (d.uniform(0, 1) < 0.5 ? -1.0 : 1.0) * d.log_uniform(bx_lo, bx_hi);
    const double target_x = bx * kt;
    const double n2 = double(p.reservoir.n2);
    const double mu_exact = fermi2d::chemical_potential(n2, p.reservoir.sigma2, p.reservoir.g);
    p.dot.e_t = target_x - p.dot.delta_e_l - p.dot.delta_e_c + mu_exact * (1.0 + 3.0 / (2.0 * n2));
    return p;
}

}  // namespace qdtherm::testing
