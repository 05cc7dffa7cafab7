#pragma once

// Low-temperature thermodynamics of a two-dimensional Fermi gas with a
// constant density of states, plus a Fermi-Dirac quadrature oracle used to
// validate the Sommerfeld forms.

#include <cstdint>
#include <vector>

#include "qdtherm/constants.hpp"

namespace qdtherm::fermi2d {

/// The finite 2D electron bath.
struct ReservoirSpec {
    std::int64_t n2 = 100;   // particle count
    double sigma2 = 1.0e4;   // nm^2
    double g = 0.0;          // meV^-1 nm^-2

    void validate() const;
};

struct ThermoPoint {
    double mu = 0.0;   // meV
    double u = 0.0;    // meV
    double psi = 0.0;  // meV
    double s = 0.0;    // meV/K
    double c_a = 0.0;  // meV K^-1 nm^-2
    double p = 0.0;    // meV nm^-2
};

/// g = m_eff / (pi^2 hbar^2) in meV^-1 nm^-2.
///
/// This is the prefactor used throughout the ensemble model. The textbook
/// spin-degenerate 2D value is m/(pi hbar^2); callers who want it should set
/// ReservoirSpec::g directly.
double dos_2d(const PhysicalConstants& constants);

double chemical_potential(double m, double area, double g);
double internal_energy(double m, double area, double g, double t,
                       const PhysicalConstants& constants = {});
double helmholtz(double m, double area, double g, double t,
                 const PhysicalConstants& constants = {});
double entropy(double m, double area, double g, double t,
               const PhysicalConstants& constants = {});
double heat_capacity_per_area(double g, double t, const PhysicalConstants& constants = {});
double pressure(double m, double area, double g, double t,
                const PhysicalConstants& constants = {});

ThermoPoint thermo_point(double m, double area, double g, double t,
                         const PhysicalConstants& constants = {});

/// Density of states as a polynomial in energy, g(E) = sum_k c_k E^k, with
/// the band bottom at E = 0. Constant g is the physical 2D case; higher
/// orders exist to exercise the general Sommerfeld terms.
class PolynomialDos {
public:
    explicit PolynomialDos(std::vector<double> coeffs);
    static PolynomialDos constant(double g) { return PolynomialDos({g}); }
    /// Linear DOS through (mu, g_at_mu) with slope g_prime_at_mu.
    static PolynomialDos linear_about(double mu, double g_at_mu, double g_prime_at_mu);

    double operator()(double e) const;
    double derivative(double e) const;
    /// Integral of g from 0 to e.
    double count_below(double e) const;
    /// Integral of E g(E) from 0 to e.
    double energy_below(double e) const;

    const std::vector<double>& coeffs() const { return coeffs_; }

private:
    std::vector<double> coeffs_;
};

/// Per-area energy and particle density.
struct DensityPair {
    double u = 0.0;  // meV nm^-2
    double n = 0.0;  // nm^-2
};

/// Second-order Sommerfeld forms, with the T = 0 integrals taken to `mu`
/// and the (k_B T)^2 corrections evaluated at the same `mu`.
DensityPair sommerfeld_expansion(const PolynomialDos& dos, double mu, double t,
                                 const PhysicalConstants& constants = {});

/// Same, for a DOS locally described by its value and slope at `mu_f`
/// (linear DOS through that point).
DensityPair sommerfeld_expansion(double g_at_mu, double g_prime_at_mu, double mu_f, double t,
                                 const PhysicalConstants& constants = {});

struct OracleTolerances {
    double mu_abs_tol = 1e-12;     // meV
    double quad_rel_tol = 1e-14;
    double bracket_kt = 50.0;      // root bracket half-width beyond [0, mu_F], units of k_B T
    double window_kt = 40.0;       // quadrature cut above mu, units of k_B T
    unsigned max_iterations = 200;
};

/// Full Fermi-Dirac integrals by adaptive quadrature.
double fd_density(const PolynomialDos& dos, double mu, double t,
                  const PhysicalConstants& constants = {}, const OracleTolerances& tol = {});
double fd_energy_density(const PolynomialDos& dos, double mu, double t,
                         const PhysicalConstants& constants = {},
                         const OracleTolerances& tol = {});

/// n = g k_B T ln(1 + e^{mu / k_B T}) for constant g.
double fd_density_closed_form(double g, double mu, double t,
                              const PhysicalConstants& constants = {});

/// Chemical potential at which the quadrature density equals `n`.
double fd_solve_mu(const PolynomialDos& dos, double n, double t,
                   const PhysicalConstants& constants = {}, const OracleTolerances& tol = {});

struct FdOracleResult {
    double mu_exact = 0.0;  // meV
    double u_exact = 0.0;   // meV, extensive
    /// Relative gap between the quadrature density and the closed form at mu_exact.
    double closed_form_gap = 0.0;
};

FdOracleResult fd_oracle(double m, double area, double g, double t,
                         const PhysicalConstants& constants = {},
                         const OracleTolerances& tol = {});

}  // namespace qdtherm::fermi2d
