#pragma once

// Finite grand canonical ensemble of a (1 <-> 2)-electron island exchanging
// one electron with a reservoir of N2 electrons.
//
// All exponentials are carried as logarithms. A LogReal is a positive real
// stored by its natural log; value() is only available while the number is
// representable as a double.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "qdtherm/constants.hpp"
#include "qdtherm/fermi2d.hpp"

namespace qdtherm::ensemble {

using fermi2d::ReservoirSpec;

struct DotSpec {
    double e_t = 0.0;        // ground level, meV
    double delta_e_c = 0.0;  // charging energy, meV
    double delta_e_l = 0.0;  // lattice relaxation S_HR * hbar*omega, meV
    int deg1 = 2;            // spin doublet
    int deg2 = 1;            // singlet
    double sigma1 = 0.0;     // island area, nm^2

    void validate() const;

    /// Lattice relaxation from a Huang-Rhys factor and a phonon energy.
    static DotSpec with_huang_rhys(double e_t, double delta_e_c, double s_hr,
                                   double hbar_omega_mev, double sigma1 = 0.0);
};

enum class MuSource {
    kSommerfeld,  // mu = N2 / (g Sigma2)
    kOracle,      // exact Fermi-Dirac mu at the ensemble temperature
};

/// Everything except the temperature: what an experiment knows about the device.
struct Device {
    ReservoirSpec reservoir;
    DotSpec dot;
    PhysicalConstants constants;

    void validate() const;
};

struct EnsembleParams {
    ReservoirSpec reservoir;
    DotSpec dot;
    double temperature = 0.0;  // K
    PhysicalConstants constants;
    MuSource mu_source = MuSource::kSommerfeld;

    static EnsembleParams at(const Device& device, double temperature);
    Device device() const { return {reservoir, dot, constants}; }

    void validate() const;
    double beta() const { return 1.0 / (constants.k_b * temperature); }
    /// Reservoir chemical potential used in the fugacity.
    double mu() const;
};

struct LogReal {
    double log = 0.0;

    bool representable() const;
    /// Throws NumericalError when the value is outside the double range.
    double value() const;
};

struct OccupancyDistribution {
    double p1 = 0.0;
    double p2 = 0.0;
};

double dot_energy(const DotSpec& dot, int n1);

/// Exponent of the fugacity for island occupancy n1, n1 (1 + n1 / (2 N2)),
/// as an exact fraction {numerator, denominator}.
std::pair<std::int64_t, std::int64_t> fugacity_exponent_fraction(int n1, std::int64_t n2);
double fugacity_exponent(int n1, std::int64_t n2);

/// Psi(N1 + N2, Sigma1 + Sigma2) - Psi(N2, Sigma2), no approximation.
double delta_helmholtz_exact(int n1, const ReservoirSpec& reservoir, double sigma1, double t,
                             const PhysicalConstants& constants = {});
/// n1 mu (1 + n1 / (2 N2)) - c_A Sigma1 T / 2.
double delta_helmholtz_approx(int n1, const ReservoirSpec& reservoir, double sigma1, double t,
                              const PhysicalConstants& constants = {});

/// tr rho(n1) without the common factor exp(-c_A Sigma1 / (2 k_B)).
LogReal weight(const EnsembleParams& params, int n1);
/// The same weight evaluated with pow/exp directly. Overflows for large exponents.
double weight_direct(const EnsembleParams& params, int n1);
/// log of exp(-c_A Sigma1 / (2 k_B)).
double common_factor_log(const EnsembleParams& params);

LogReal partition_qg(const EnsembleParams& params);
OccupancyDistribution occupation_probability(const EnsembleParams& params);

/// E_T + dE_L + dE_C - mu (1 + 3 / (2 N2)), with the Sommerfeld mu.
double effective_energy_gap(const Device& device);
/// Same, using params.mu() (honours MuSource).
double effective_energy_gap(const EnsembleParams& params);
/// E_T + dE_L + dE_C - mu: the N2 -> infinity gap.
double infinite_reservoir_gap(const Device& device);

/// p1 / p2 = (deg1 / deg2) exp(beta X).
LogReal occupation_ratio(const EnsembleParams& params);
LogReal infinite_reservoir_ratio(const EnsembleParams& params);

/// ln Z_QG - c_A Sigma1 / (2 k_B); zero when the normalization holds.
double state_equation_residual(const EnsembleParams& params);

struct IslandArea {
    std::optional<double> sigma1;  // nm^2
    std::string diagnostic;
};

IslandArea consistent_island_area(const EnsembleParams& params);
/// Sigma1* = 2 k_B ln Z / c_A.
IslandArea consistent_island_area(double log_z, double c_a, double k_b);

}  // namespace qdtherm::ensemble
