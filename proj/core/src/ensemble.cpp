#include "qdtherm/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace qdtherm::ensemble {

namespace {

// exp() of anything beyond this is outside the double range.
constexpr double kMaxLog = 700.0;

void check_occupancy(int n1) {
    if (n1 != 1 && n1 != 2) {
        std::ostringstream msg;
        msg << "island occupancy must be 1 or 2, got " << n1;
        throw DomainError(msg.str());
    }
}

int degeneracy(const DotSpec& dot, int n1) { return n1 == 1 ? dot.deg1 : dot.deg2; }

double log_sum_exp(double a, double b) {
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

void DotSpec::validate() const {
    detail::require(std::isfinite(e_t), "dot.e_t: must be finite");
    detail::require(std::isfinite(delta_e_c) && delta_e_c >= 0, "dot.delta_e_c: must be >= 0");
    detail::require(std::isfinite(delta_e_l), "dot.delta_e_l: must be finite");
    detail::require(deg1 >= 1, "dot.deg1: must be >= 1");
    detail::require(deg2 >= 1, "dot.deg2: must be >= 1");
    detail::require(std::isfinite(sigma1) && sigma1 >= 0, "dot.sigma1: must be >= 0");
}

DotSpec DotSpec::with_huang_rhys(double e_t, double delta_e_c, double s_hr,
                                 double hbar_omega_mev, double sigma1) {
    detail::require(std::isfinite(s_hr) && s_hr >= 0, "dot.huang_rhys.s_hr: must be >= 0");
    detail::require(std::isfinite(hbar_omega_mev) && hbar_omega_mev >= 0,
                    "dot.huang_rhys.hbar_omega: must be >= 0");
    DotSpec dot;
    dot.e_t = e_t;
    dot.delta_e_c = delta_e_c;
    dot.delta_e_l = s_hr * hbar_omega_mev;
    dot.sigma1 = sigma1;
    return dot;
}

void Device::validate() const {
    constants.validate();
    reservoir.validate();
    dot.validate();
}

EnsembleParams EnsembleParams::at(const Device& device, double temperature) {
    EnsembleParams p;
    p.reservoir = device.reservoir;
    p.dot = device.dot;
    p.constants = device.constants;
    p.temperature = temperature;
    return p;
}

void EnsembleParams::validate() const {
    constants.validate();
    reservoir.validate();
    dot.validate();
    detail::require(std::isfinite(temperature) && temperature > 0, "temperature: must be > 0");
}

double EnsembleParams::mu() const {
    const double m = double(reservoir.n2);
    if (mu_source == MuSource::kOracle) {
        return fermi2d::fd_oracle(m, reservoir.sigma2, reservoir.g, temperature, constants)
            .mu_exact;
    }
    return fermi2d::chemical_potential(m, reservoir.sigma2, reservoir.g);
}

bool LogReal::representable() const { return std::isfinite(log) && std::abs(log) <= kMaxLog; }

double LogReal::value() const {
    if (!representable()) {
        std::ostringstream msg;
        msg << "value exp(" << log << ") is not representable as a double";
        throw NumericalError(msg.str());
    }
    return std::exp(log);
}

double dot_energy(const DotSpec& dot, int n1) {
    check_occupancy(n1);
    return n1 == 1 ? dot.e_t : 2.0 * dot.e_t + dot.delta_e_c + dot.delta_e_l;
}

std::pair<std::int64_t, std::int64_t> fugacity_exponent_fraction(int n1, std::int64_t n2) {
    check_occupancy(n1);
    detail::require(n2 >= 1, "reservoir.n2: must be >= 1");
    std::int64_t num = std::int64_t(n1) * (2 * n2 + n1);
    std::int64_t den = 2 * n2;
    const std::int64_t common = std::gcd(num, den);
    return {num / common, den / common};
}

double fugacity_exponent(int n1, std::int64_t n2) {
    check_occupancy(n1);
    detail::require(n2 >= 1, "reservoir.n2: must be >= 1");
    return double(n1) * (1.0 + double(n1) / (2.0 * double(n2)));
}

double delta_helmholtz_exact(int n1, const ReservoirSpec& reservoir, double sigma1, double t,
                             const PhysicalConstants& c) {
    check_occupancy(n1);
    reservoir.validate();
    detail::require(std::isfinite(sigma1) && sigma1 >= 0, "sigma1: must be >= 0");
    detail::require(std::isfinite(t) && t > 0, "temperature: must be > 0");
    const double n2 = double(reservoir.n2);
    return fermi2d::helmholtz(n2 + n1, reservoir.sigma2 + sigma1, reservoir.g, t, c) -
           fermi2d::helmholtz(n2, reservoir.sigma2, reservoir.g, t, c);
}

double delta_helmholtz_approx(int n1, const ReservoirSpec& reservoir, double sigma1, double t,
                              const PhysicalConstants& c) {
    check_occupancy(n1);
    reservoir.validate();
    detail::require(std::isfinite(sigma1) && sigma1 >= 0, "sigma1: must be >= 0");
    detail::require(std::isfinite(t) && t > 0, "temperature: must be > 0");
    const double n2 = double(reservoir.n2);
    const double mu = fermi2d::chemical_potential(n2, reservoir.sigma2, reservoir.g);
    const double c_a = fermi2d::heat_capacity_per_area(reservoir.g, t, c);
    return n1 * mu * (1.0 + n1 / (2.0 * n2)) - 0.5 * c_a * sigma1 * t;
}

LogReal weight(const EnsembleParams& params, int n1) {
    check_occupancy(n1);
    params.validate();
    const double beta = params.beta();
    const double log_fugacity = beta * params.mu();
    return LogReal{fugacity_exponent(n1, params.reservoir.n2) * log_fugacity +
                   std::log(double(degeneracy(params.dot, n1))) -
                   beta * dot_energy(params.dot, n1)};
}

double weight_direct(const EnsembleParams& params, int n1) {
    check_occupancy(n1);
    params.validate();
    const double beta = params.beta();
    const double z = std::exp(beta * params.mu());
    return std::pow(z, fugacity_exponent(n1, params.reservoir.n2)) *
           double(degeneracy(params.dot, n1)) * std::exp(-beta * dot_energy(params.dot, n1));
}

double common_factor_log(const EnsembleParams& params) {
    params.validate();
    const double c_a =
        fermi2d::heat_capacity_per_area(params.reservoir.g, params.temperature, params.constants);
    return -c_a * params.dot.sigma1 / (2.0 * params.constants.k_b);
}

LogReal partition_qg(const EnsembleParams& params) {
    return LogReal{log_sum_exp(weight(params, 1).log, weight(params, 2).log)};
}

OccupancyDistribution occupation_probability(const EnsembleParams& params) {
    const double l1 = weight(params, 1).log;
    const double l2 = weight(params, 2).log;
    // Logistic form: each probability from the log-weight difference.
    const double d = l2 - l1;
    OccupancyDistribution out;
    if (d > 0) {
        const double e = std::exp(-d);
        out.p1 = e / (1.0 + e);
        out.p2 = 1.0 / (1.0 + e);
    } else {
        const double e = std::exp(d);
        out.p1 = 1.0 / (1.0 + e);
        out.p2 = e / (1.0 + e);
    }
    return out;
}

double effective_energy_gap(const Device& device) {
    device.validate();
    const auto& r = device.reservoir;
    const double n2 = double(r.n2);
    const double mu = fermi2d::chemical_potential(n2, r.sigma2, r.g);
    const auto& d = device.dot;
    return d.e_t + d.delta_e_l + d.delta_e_c - mu * (1.0 + 3.0 / (2.0 * n2));
}

double effective_energy_gap(const EnsembleParams& params) {
    params.validate();
    const double n2 = double(params.reservoir.n2);
    const auto& d = params.dot;
    return d.e_t + d.delta_e_l + d.delta_e_c - params.mu() * (1.0 + 3.0 / (2.0 * n2));
}

double infinite_reservoir_gap(const Device& device) {
    device.validate();
    const auto& r = device.reservoir;
    const double mu = fermi2d::chemical_potential(double(r.n2), r.sigma2, r.g);
    const auto& d = device.dot;
    return d.e_t + d.delta_e_l + d.delta_e_c - mu;
}

LogReal occupation_ratio(const EnsembleParams& params) {
    const double x = effective_energy_gap(params);
    return LogReal{std::log(double(params.dot.deg1) / double(params.dot.deg2)) +
                   params.beta() * x};
}

LogReal infinite_reservoir_ratio(const EnsembleParams& params) {
    params.validate();
    const auto& d = params.dot;
    const double x = d.e_t + d.delta_e_l + d.delta_e_c - params.mu();
    return LogReal{std::log(double(d.deg1) / double(d.deg2)) + params.beta() * x};
}

double state_equation_residual(const EnsembleParams& params) {
    return partition_qg(params).log + common_factor_log(params);
}

IslandArea consistent_island_area(double log_z, double c_a, double k_b) {
    detail::require(std::isfinite(log_z), "consistent_island_area: ln Z must be finite");
    detail::require(std::isfinite(c_a) && c_a > 0, "consistent_island_area: c_A must be > 0");
    detail::require(std::isfinite(k_b) && k_b > 0, "consistent_island_area: k_B must be > 0");
    if (log_z < 0) {
        std::ostringstream msg;
        msg << "no nonnegative consistent area: ln Z_QG = " << log_z << " < 0";
        return IslandArea{std::nullopt, msg.str()};
    }
    return IslandArea{2.0 * k_b * log_z / c_a, {}};
}

IslandArea consistent_island_area(const EnsembleParams& params) {
    const double log_z = partition_qg(params).log;
    const double c_a =
        fermi2d::heat_capacity_per_area(params.reservoir.g, params.temperature, params.constants);
    return consistent_island_area(log_z, c_a, params.constants.k_b);
}

}  // namespace qdtherm::ensemble
