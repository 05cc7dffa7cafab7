#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "qdtherm/fermi2d.hpp"
#include "support.hpp"

namespace qdtherm::fermi2d {
namespace {

using testing::Draw;
using testing::rel_err;

constexpr double kPi2 = kPi * kPi;

// m_eff / (pi^2 hbar^2) for 0.19 m_e with hbar = 6.582119569e-13 meV s,
// evaluated at 40 digits.
constexpr double kSiliconDosGolden = 2.526393078512744214857e-4;

TEST(Dos2d, SiliconDefaultGolden) {
    const double g = dos_2d({});
    EXPECT_TRUE(std::isfinite(g));
    EXPECT_GT(g, 0.0);
    EXPECT_LT(rel_err(g, kSiliconDosGolden), 1e-12);
    // The SI route (hbar in J s) differs only by the last digits of CODATA hbar.
    EXPECT_LT(rel_err(g, 2.526393081217897e-4), 2e-9);
}

TEST(Dos2d, LinearInMass) {
    PhysicalConstants c;
    const double g1 = dos_2d(c);
    c.m_eff *= 2.0;
    EXPECT_DOUBLE_EQ(dos_2d(c), 2.0 * g1);
}

TEST(Dos2d, RejectsInvalidConstants) {
    PhysicalConstants c;
    c.hbar = 0.0;
    EXPECT_THROW(dos_2d(c), DomainError);
}

TEST(ChemicalPotential, ZeroAndArithmetic) {
    EXPECT_EQ(chemical_potential(0, 100, 1), 0.0);
    EXPECT_DOUBLE_EQ(chemical_potential(200, 100, 1), 2.0);
}

TEST(ChemicalPotential, LinearInParticleCount) {
    Draw d(11);
    for (int i = 0; i < 1000; ++i) {
        const double m = d.uniform(0, 1e4);
        const double a = d.log_uniform(10, 1e6);
        const double g = d.log_uniform(1e-5, 1);
        EXPECT_EQ(chemical_potential(2 * m, a, g), 2 * chemical_potential(m, a, g));
    }
}

TEST(ChemicalPotential, DomainErrors) {
    EXPECT_THROW(chemical_potential(1, 0, 1), DomainError);
    EXPECT_THROW(chemical_potential(1, -1, 1), DomainError);
    EXPECT_THROW(chemical_potential(1, 1, 0), DomainError);
    EXPECT_THROW(chemical_potential(-1, 1, 1), DomainError);
}

TEST(InternalEnergy, Limits) {
    const double g = 2.5e-4;
    EXPECT_DOUBLE_EQ(internal_energy(100, 1e4, g, 0.0), 100.0 * 100.0 / (2 * g * 1e4));
    const double kt = PhysicalConstants{}.k_b * 3.0;
    EXPECT_DOUBLE_EQ(internal_energy(0, 1e4, g, 3.0), kPi2 / 6 * g * 1e4 * kt * kt);
    EXPECT_THROW(internal_energy(1, 1, 1, -1.0), DomainError);
}

TEST(Helmholtz, ZeroTemperatureEqualsEnergyAndDecreases) {
    const double g = 2.5e-4;
    EXPECT_EQ(helmholtz(70, 5e3, g, 0.0), internal_energy(70, 5e3, g, 0.0));
    double previous = helmholtz(70, 5e3, g, 0.0);
    for (double t = 0.5; t < 300; t *= 1.5) {
        const double psi = helmholtz(70, 5e3, g, t);
        EXPECT_LT(psi, previous);
        previous = psi;
    }
}

TEST(Entropy, ZeroExtensiveAndConsistentWithHeatCapacity) {
    const double g = 2.5e-4;
    EXPECT_EQ(entropy(10, 1e4, g, 0.0), 0.0);
    Draw d(5);
    for (int i = 0; i < 200; ++i) {
        const double a = d.log_uniform(10, 1e6);
        const double t = d.uniform(0, 300);
        const double m = d.uniform(0, 1e3);
        EXPECT_LT(rel_err(entropy(m, a, g, t), a * heat_capacity_per_area(g, t)), 1e-15);
        EXPECT_LT(rel_err(entropy(m, 2 * a, g, t), 2 * entropy(m, a, g, t)), 1e-15);
    }
    EXPECT_THROW(entropy(1, 1, 1, -0.1), DomainError);
}

TEST(HeatCapacity, LinearInTemperature) {
    EXPECT_EQ(heat_capacity_per_area(1e-3, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(heat_capacity_per_area(1e-3, 8.4), 2 * heat_capacity_per_area(1e-3, 4.2));
    EXPECT_THROW(heat_capacity_per_area(1e-3, -1.0), DomainError);
}

TEST(Pressure, ZeroAndGroundState) {
    EXPECT_EQ(pressure(0, 1e4, 1e-3, 0.0), 0.0);
    const double m = 120;
    const double a = 7e3;
    const double g = 3e-4;
    EXPECT_DOUBLE_EQ(pressure(m, a, g, 0.0), m * m / (2 * g * a * a));
}

// Closed forms against long double evaluation of the same polynomials.
TEST(Fermi2d, ClosedFormsWithinFourUlp) {
    Draw d(99);
    const PhysicalConstants c;
    const auto ulps = [](double got, long double ref) {
        const double r = double(ref);
        const double ulp = std::nextafter(r, std::numeric_limits<double>::infinity()) - r;
        return std::abs(got - r) / ulp;
    };
    for (int i = 0; i < 2000; ++i) {
        const double m = d.uniform(0, 1e4);
        const double a = d.log_uniform(10, 1e6);
        const double g = d.log_uniform(1e-5, 1e-1);
        const double t = d.uniform(0.01, 300);
        const long double kt = (long double)c.k_b * t;
        const long double pi2 = 3.14159265358979323846264338327950288L * 3.14159265358979323846264338327950288L;
        const long double ground = (long double)m * m / (2.0L * g * a);
        const long double thermal = pi2 / 6.0L * g * a * kt * kt;
        EXPECT_LE(ulps(internal_energy(m, a, g, t, c), ground + thermal), 4.0);
        EXPECT_LE(ulps(chemical_potential(m, a, g), (long double)m / ((long double)g * a)), 4.0);
        EXPECT_LE(ulps(heat_capacity_per_area(g, t, c),
                       pi2 / 3.0L * g * (long double)c.k_b * c.k_b * t),
                  4.0);
        EXPECT_LE(ulps(pressure(m, a, g, t, c),
                       (long double)m * m / (2.0L * g * a * a) + pi2 / 6.0L * g * kt * kt),
                  4.0);
    }
}

class ThermoIdentities : public ::testing::Test {
protected:
    struct Point {
        double m, a, g, t;
    };
    // Fermi energies 0.1..200 meV and k_B T / mu_F from 1e-3 to 1: the range
    // where both the ground and thermal terms carry information in a double.
    static Point draw(Draw& d) {
        const PhysicalConstants c;
        const double a = d.log_uniform(10, 1e6);
        const double g = d.log_uniform(1e-5, 1e-1);
        const double mu = d.log_uniform(0.1, 200);
        const double t = mu * d.log_uniform(1e-3, 1.0) / c.k_b;
        return {g * a * mu, a, g, t};
    }
};

TEST_F(ThermoIdentities, EnergyMinusHelmholtzIsTS) {
    Draw d(1);
    for (int i = 0; i < 10000; ++i) {
        const auto p = draw(d);
        const double lhs = internal_energy(p.m, p.a, p.g, p.t) - helmholtz(p.m, p.a, p.g, p.t);
        const double rhs = p.t * entropy(p.m, p.a, p.g, p.t);
        // U and Psi share the large ground term; allow for its cancellation.
        const double scale = internal_energy(p.m, p.a, p.g, p.t);
        EXPECT_LE(std::abs(lhs - rhs), 1e-14 * scale + 1e-14 * rhs);
    }
}

TEST_F(ThermoIdentities, FiniteDifferenceDerivatives) {
    Draw d(2);
    for (int i = 0; i < 10000; ++i) {
        const auto p = draw(d);
        // Psi and U are quadratic in T, so a wide central step carries no
        // truncation error and keeps the ground-state term from swamping it.
        const double h = 0.5 * p.t;
        const double s = entropy(p.m, p.a, p.g, p.t);
        const double ds =
            -(helmholtz(p.m, p.a, p.g, p.t + h) - helmholtz(p.m, p.a, p.g, p.t - h)) / (2 * h);
        EXPECT_LT(rel_err(ds, s), 1e-6);

        const double pr = pressure(p.m, p.a, p.g, p.t);
        const double ha = 1e-4 * p.a;
        const double dp =
            -(helmholtz(p.m, p.a + ha, p.g, p.t) - helmholtz(p.m, p.a - ha, p.g, p.t)) / (2 * ha);
        EXPECT_LT(rel_err(dp, pr), 1e-6);

        const double ca = heat_capacity_per_area(p.g, p.t);
        const double dc =
            (internal_energy(p.m, p.a, p.g, p.t + h) - internal_energy(p.m, p.a, p.g, p.t - h)) /
            (2 * h * p.a);
        EXPECT_LT(rel_err(dc, ca), 1e-6);
    }
}

TEST(Fermi2d, EnergyUnitRescaling) {
    // Switching energies to a unit s times smaller multiplies k_B by s and
    // divides g by s; every energy-valued result scales by s.
    const double s = 1000.0;
    PhysicalConstants c;
    PhysicalConstants cs = c;
    cs.k_b *= s;
    const double m = 150, a = 2e4, g = 2.5e-4, t = 7.0;
    const auto base = thermo_point(m, a, g, t, c);
    const auto scaled = thermo_point(m, a, g / s, t, cs);
    EXPECT_LT(rel_err(scaled.mu, s * base.mu), 1e-14);
    EXPECT_LT(rel_err(scaled.u, s * base.u), 1e-14);
    EXPECT_LT(rel_err(scaled.psi, s * base.psi), 1e-14);
    EXPECT_LT(rel_err(scaled.s, s * base.s), 1e-14);
    EXPECT_LT(rel_err(scaled.c_a, s * base.c_a), 1e-14);
    EXPECT_LT(rel_err(scaled.p, s * base.p), 1e-14);
}

TEST(PolynomialDos, IntegralsMatchDefinition) {
    const PolynomialDos dos({2.0, -0.5, 0.25});
    EXPECT_DOUBLE_EQ(dos(2.0), 2.0 - 1.0 + 1.0);
    EXPECT_DOUBLE_EQ(dos.derivative(2.0), -0.5 + 1.0);
    EXPECT_DOUBLE_EQ(dos.count_below(3.0), 2.0 * 3 - 0.25 * 9 + 0.25 * 27 / 3);
    EXPECT_DOUBLE_EQ(dos.energy_below(3.0), 2.0 * 9 / 2 - 0.5 * 27 / 3 + 0.25 * 81 / 4);
    EXPECT_THROW(PolynomialDos({}), DomainError);
}

TEST(Sommerfeld, ConstantDosReducesToClosedForms) {
    const PhysicalConstants c;
    const double g = 2.5e-4, mu = 30.0, t = 4.2;
    const auto r = sommerfeld_expansion(g, 0.0, mu, t, c);
    const double kt = c.k_b * t;
    EXPECT_DOUBLE_EQ(r.u, g / 2 * mu * mu + kPi2 / 6 * g * kt * kt);
    EXPECT_DOUBLE_EQ(r.n, g * mu);
    // Per-area versions of the extensive forms at M = g A mu.
    const double a = 1e4;
    EXPECT_LT(rel_err(a * r.u, internal_energy(g * a * mu, a, g, t, c)), 1e-14);
}

TEST(Sommerfeld, ZeroTemperatureIsTheGroundIntegral) {
    const PolynomialDos dos({1.0, 0.3});
    const auto r = sommerfeld_expansion(dos, 5.0, 0.0);
    EXPECT_DOUBLE_EQ(r.u, 25.0 / 2 + 0.3 * 125.0 / 3);
    EXPECT_DOUBLE_EQ(r.n, 5.0 + 0.3 * 25.0 / 2);
}

TEST(Sommerfeld, LinearDosMatchesOracleBeyondFourthOrder) {
    // For linear g the expansion has no (k_B T)^4 term, so the oracle gap is
    // far below the C (k_B T / mu)^4 envelope.
    const PhysicalConstants c;
    const double mu = 10.0, g = 1e-3, gp = 5e-5;
    const auto dos = PolynomialDos::linear_about(mu, g, gp);
    for (double ratio : {0.05, 0.02, 0.01}) {
        const double t = ratio * mu / c.k_b;
        const auto approx = sommerfeld_expansion(g, gp, mu, t, c);
        const double exact = fd_energy_density(dos, mu, t, c);
        EXPECT_LT(rel_err(approx.u, exact), std::pow(ratio, 4));
        EXPECT_LT(rel_err(approx.n, fd_density(dos, mu, t, c)), std::pow(ratio, 4));
    }
}

TEST(Sommerfeld, QuadraticDosConvergesAtFourthOrder) {
    const PhysicalConstants c;
    const PolynomialDos dos({1e-3, 1e-4, 1e-5});
    const double mu = 10.0;
    std::vector<double> xs, errs;
    for (double ratio = 0.005; ratio <= 0.0501; ratio *= std::pow(10.0, 0.25)) {
        const double t = ratio * mu / c.k_b;
        const double exact = fd_energy_density(dos, mu, t, c);
        const double err = std::abs(sommerfeld_expansion(dos, mu, t, c).u - exact) / exact;
        xs.push_back(std::log(ratio));
        errs.push_back(std::log(err));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += errs[i];
    mx /= double(xs.size());
    my /= double(xs.size());
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (errs[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    EXPECT_GE(slope, 3.5);
    EXPECT_NEAR(slope, 4.0, 0.05);
}

TEST(FdOracle, ClosedFormDensityMatchesQuadrature) {
    const PhysicalConstants c;
    const auto dos = PolynomialDos::constant(2.5e-4);
    for (double mu : {-2.0, -0.1, 0.0, 0.3, 5.0, 40.0}) {
        for (double t : {0.5, 4.2, 30.0}) {
            EXPECT_LT(rel_err(fd_density(dos, mu, t, c), fd_density_closed_form(2.5e-4, mu, t, c)),
                      1e-10)
                << "mu=" << mu << " T=" << t;
        }
    }
}

TEST(FdOracle, DegenerateLimitRecoversFermiEnergy) {
    const PhysicalConstants c;
    const double m = 100, a = 1e4, g = dos_2d(c);
    const double mu_f = m / (g * a);
    for (double t : {10.0, 1.0, 0.1, 0.01}) {
        const auto r = fd_oracle(m, a, g, t, c);
        EXPECT_NEAR(r.mu_exact, mu_f, 1e-9) << "T=" << t;
        EXPECT_LT(r.closed_form_gap, 1e-10);
    }
}

TEST(FdOracle, SommerfeldGapAtTwoPercent) {
    const PhysicalConstants c;
    const double m = 100, a = 1e4, g = dos_2d(c);
    const double mu_f = m / (g * a);
    const double t = 0.02 * mu_f / c.k_b;
    const auto r = fd_oracle(m, a, g, t, c);
    const double gap = std::abs(internal_energy(m, a, g, t, c) - r.u_exact) / r.u_exact;
    EXPECT_LE(gap, 1e-3);
    // Constant g leaves only exp(-mu/kT) corrections; measured ~1e-16.
    EXPECT_LE(gap, 1e-13);
}

TEST(FdOracle, HighTemperatureNondegenerateGas) {
    // k_B T >> mu_F: mu is negative and the closed form still agrees.
    const PhysicalConstants c;
    const double m = 1, a = 1e4, g = 2.5e-4;
    const auto r = fd_oracle(m, a, g, 300.0, c);
    EXPECT_LT(r.mu_exact, 0.0);
    EXPECT_LT(rel_err(fd_density_closed_form(g, r.mu_exact, 300.0, c), m / a), 1e-10);
}

TEST(FdOracle, Errors) {
    EXPECT_THROW(fd_oracle(100, 1e4, 2.5e-4, 0.0), DomainError);
    EXPECT_THROW(fd_oracle(0, 1e4, 2.5e-4, 1.0), DomainError);
    OracleTolerances tol;
    tol.bracket_kt = -10.0;  // empty bracket
    EXPECT_THROW(fd_oracle(100, 1e4, 2.5e-4, 4.2, {}, tol), NumericalError);
}

TEST(FdOracle, GeneralSolverInvertsDensity) {
    const PhysicalConstants c;
    const PolynomialDos dos({1e-3, 1e-4, 1e-5});
    const double mu = 8.0, t = 10.0;
    const double n = fd_density(dos, mu, t, c);
    EXPECT_NEAR(fd_solve_mu(dos, n, t, c), mu, 1e-10);
}

}  // namespace
}  // namespace qdtherm::fermi2d
