#include "qdtherm/fermi2d.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdtherm::fermi2d {

namespace {

constexpr double kPi2 = kPi * kPi;

void check_extensive_args(double m, double area, double g) {
    detail::require(std::isfinite(m) && m >= 0, "particle count must be >= 0");
    detail::require(std::isfinite(area) && area > 0, "area must be > 0");
    detail::require(std::isfinite(g) && g > 0, "density of states must be > 0");
}

void check_temperature(double t) {
    detail::require(std::isfinite(t) && t >= 0, "temperature must be >= 0");
}

// 1 / (1 + e^x) without overflow.
double fermi_factor(double x) {
    if (x > 0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

template <class F>
double integrate(F f, double a, double b, const OracleTolerances& tol) {
    if (!(b > a)) return 0.0;
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20,
                                                                       tol.quad_rel_tol, &error);
}

// Integral of h(E) f(E) over E >= 0, written as the T = 0 part plus the
// hole correction below mu and the electron tail above mu. Both corrections
// are confined to a window of width window_kt * k_B T around mu and are
// integrated in x = |E - mu| / k_B T so the Fermi factor is exact in x.
template <class H, class Below>
double fermi_integral(H h, Below below, double mu, double kt, const OracleTolerances& tol) {
    const double width = tol.window_kt;
    const auto tail = [&](double x) { return h(mu + kt * x) * fermi_factor(x); };
    if (mu <= 0) {
        // Whole band sits above mu: start at the band bottom x0 = -mu / kT.
        return kt * integrate(tail, -mu / kt, -mu / kt + width, tol);
    }
    const auto holes = [&](double x) { return h(mu - kt * x) * fermi_factor(x); };
    return below(mu) - kt * integrate(holes, 0.0, std::min(width, mu / kt), tol) +
           kt * integrate(tail, 0.0, width, tol);
}

}  // namespace

void ReservoirSpec::validate() const {
    detail::require(n2 >= 1, "reservoir.n2: must be >= 1");
    detail::require(std::isfinite(sigma2) && sigma2 > 0, "reservoir.sigma2: must be > 0");
    detail::require(std::isfinite(g) && g > 0, "reservoir.g: must be > 0");
}

double dos_2d(const PhysicalConstants& constants) {
    constants.validate();
    const double per_kg = constants.m_eff / (kPi2 * constants.hbar * constants.hbar);
    return per_kg * kMeVPerJoule / kNm2PerM2;
}

double chemical_potential(double m, double area, double g) {
    check_extensive_args(m, area, g);
    return m / (g * area);
}

double internal_energy(double m, double area, double g, double t, const PhysicalConstants& c) {
    check_extensive_args(m, area, g);
    check_temperature(t);
    const double kt = c.k_b * t;
    return m * m / (2.0 * g * area) + kPi2 / 6.0 * g * area * kt * kt;
}

double helmholtz(double m, double area, double g, double t, const PhysicalConstants& c) {
    check_extensive_args(m, area, g);
    check_temperature(t);
    const double kt = c.k_b * t;
    return m * m / (2.0 * g * area) - kPi2 / 6.0 * g * area * kt * kt;
}

double entropy(double m, double area, double g, double t, const PhysicalConstants& c) {
    check_extensive_args(m, area, g);
    check_temperature(t);
    return kPi2 / 3.0 * g * area * c.k_b * c.k_b * t;
}

double heat_capacity_per_area(double g, double t, const PhysicalConstants& c) {
    detail::require(std::isfinite(g) && g > 0, "density of states must be > 0");
    check_temperature(t);
    return kPi2 / 3.0 * g * c.k_b * c.k_b * t;
}

double pressure(double m, double area, double g, double t, const PhysicalConstants& c) {
    check_extensive_args(m, area, g);
    check_temperature(t);
    const double kt = c.k_b * t;
    return m * m / (2.0 * g * area * area) + kPi2 / 6.0 * g * kt * kt;
}

ThermoPoint thermo_point(double m, double area, double g, double t, const PhysicalConstants& c) {
    return ThermoPoint{
        .mu = chemical_potential(m, area, g),
        .u = internal_energy(m, area, g, t, c),
        .psi = helmholtz(m, area, g, t, c),
        .s = entropy(m, area, g, t, c),
        .c_a = heat_capacity_per_area(g, t, c),
        .p = pressure(m, area, g, t, c),
    };
}

PolynomialDos::PolynomialDos(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    detail::require(!coeffs_.empty(), "PolynomialDos: at least one coefficient required");
}

PolynomialDos PolynomialDos::linear_about(double mu, double g_at_mu, double g_prime_at_mu) {
    return PolynomialDos({g_at_mu - g_prime_at_mu * mu, g_prime_at_mu});
}

double PolynomialDos::operator()(double e) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * e + *it;
    return acc;
}

double PolynomialDos::derivative(double e) const {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size() - 1; k >= 1; --k) acc = acc * e + double(k) * coeffs_[k];
    return acc;
}

double PolynomialDos::count_below(double e) const {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * e + coeffs_[k] / double(k + 1);
    return acc * e;
}

double PolynomialDos::energy_below(double e) const {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * e + coeffs_[k] / double(k + 2);
    return acc * e * e;
}

DensityPair sommerfeld_expansion(const PolynomialDos& dos, double mu, double t,
                                 const PhysicalConstants& c) {
    detail::require(std::isfinite(mu) && mu > 0, "sommerfeld_expansion: mu must be > 0");
    check_temperature(t);
    const double kt = c.k_b * t;
    const double thermal = kPi2 / 6.0 * kt * kt;
    const double g = dos(mu);
    const double g_prime = dos.derivative(mu);
    return DensityPair{
        .u = dos.energy_below(mu) + thermal * (mu * g_prime + g),
        .n = dos.count_below(mu) + thermal * g_prime,
    };
}

DensityPair sommerfeld_expansion(double g_at_mu, double g_prime_at_mu, double mu_f, double t,
                                 const PhysicalConstants& c) {
    return sommerfeld_expansion(PolynomialDos::linear_about(mu_f, g_at_mu, g_prime_at_mu), mu_f,
                                t, c);
}

double fd_density(const PolynomialDos& dos, double mu, double t, const PhysicalConstants& c,
                  const OracleTolerances& tol) {
    detail::require(std::isfinite(t) && t > 0, "fd_density: temperature must be > 0");
    const double kt = c.k_b * t;
    return fermi_integral([&](double e) { return dos(e); },
                          [&](double e) { return dos.count_below(e); }, mu, kt, tol);
}

double fd_energy_density(const PolynomialDos& dos, double mu, double t,
                         const PhysicalConstants& c, const OracleTolerances& tol) {
    detail::require(std::isfinite(t) && t > 0, "fd_energy_density: temperature must be > 0");
    const double kt = c.k_b * t;
    return fermi_integral([&](double e) { return e * dos(e); },
                          [&](double e) { return dos.energy_below(e); }, mu, kt, tol);
}

double fd_density_closed_form(double g, double mu, double t, const PhysicalConstants& c) {
    detail::require(std::isfinite(t) && t > 0, "fd_density_closed_form: temperature must be > 0");
    const double kt = c.k_b * t;
    const double x = mu / kt;
    // ln(1 + e^x), stable for either sign of x
    const double softplus = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    return g * kt * softplus;
}

namespace {

double solve_bracketed(const PolynomialDos& dos, double n, double t, double lo, double hi,
                       const PhysicalConstants& c, const OracleTolerances& tol) {
    const auto residual = [&](double mu) { return fd_density(dos, mu, t, c, tol) - n; };
    const double f_lo = residual(lo);
    const double f_hi = residual(hi);
    if (!(f_lo <= 0 && f_hi >= 0)) {
        std::ostringstream msg;
        msg << "fd oracle: chemical potential not bracketed in [" << lo << ", " << hi
            << "] meV (residuals " << f_lo << ", " << f_hi << ")";
        throw NumericalError(msg.str());
    }
    if (f_lo == 0) return lo;
    if (f_hi == 0) return hi;
    boost::uintmax_t iterations = tol.max_iterations;
    const double abs_tol = tol.mu_abs_tol;
    const auto [a, b] = boost::math::tools::toms748_solve(
        residual, lo, hi, f_lo, f_hi,
        [abs_tol](double x, double y) { return std::abs(x - y) <= abs_tol; }, iterations);
    if (iterations >= tol.max_iterations) {
        std::ostringstream msg;
        msg << "fd oracle: root finding did not converge after " << iterations
            << " iterations; bracket [" << a << ", " << b << "]";
        throw NumericalError(msg.str());
    }
    return 0.5 * (a + b);
}

}  // namespace

double fd_solve_mu(const PolynomialDos& dos, double n, double t, const PhysicalConstants& c,
                   const OracleTolerances& tol) {
    detail::require(std::isfinite(n) && n > 0, "fd_solve_mu: density must be > 0");
    detail::require(std::isfinite(t) && t > 0, "fd_solve_mu: temperature must be > 0");
    const double kt = c.k_b * t;
    const double lo = -tol.bracket_kt * kt;
    double hi = tol.bracket_kt * kt;
    for (unsigned i = 0; fd_density(dos, hi, t, c, tol) < n; ++i) {
        if (i >= tol.max_iterations) throw NumericalError("fd_solve_mu: no upper bracket found");
        hi *= 2.0;
    }
    return solve_bracketed(dos, n, t, lo, hi, c, tol);
}

FdOracleResult fd_oracle(double m, double area, double g, double t, const PhysicalConstants& c,
                         const OracleTolerances& tol) {
    detail::require(std::isfinite(m) && m > 0, "fd_oracle: particle count must be > 0");
    check_extensive_args(m, area, g);
    detail::require(std::isfinite(t) && t > 0, "fd_oracle: temperature must be > 0");
    const double kt = c.k_b * t;
    const double n = m / area;
    const double mu_f = n / g;
    const PolynomialDos dos = PolynomialDos::constant(g);

    FdOracleResult out;
    out.mu_exact = solve_bracketed(dos, n, t, -tol.bracket_kt * kt, mu_f + tol.bracket_kt * kt,
                                   c, tol);
    out.u_exact = area * fd_energy_density(dos, out.mu_exact, t, c, tol);
    const double quad = fd_density(dos, out.mu_exact, t, c, tol);
    const double closed = fd_density_closed_form(g, out.mu_exact, t, c);
    out.closed_form_gap = std::abs(quad - closed) / closed;
    return out;
}

}  // namespace qdtherm::fermi2d
