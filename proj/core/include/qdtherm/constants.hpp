#pragma once

#include <stdexcept>
#include <string>

namespace qdtherm {

// Library unit system: energy meV, area nm^2, temperature K, time s,
// current A. Masses are carried in kg and converted where needed.

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kElectronMassKg = 9.1093837015e-31;
inline constexpr double kMeVPerJoule = 6.241509074460763e21;
inline constexpr double kNm2PerM2 = 1e18;

/// Transverse effective mass of a (100) silicon inversion layer, in units of m_e.
inline constexpr double kSiliconTransverseMass = 0.19;

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PhysicalConstants {
    double k_b = 8.617333262e-2;  // meV/K
    double hbar = 6.582119569e-13;  // meV s
    double m_eff = kSiliconTransverseMass * kElectronMassKg;  // kg

    void validate() const;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw DomainError(what);
}

}  // namespace detail

}  // namespace qdtherm
