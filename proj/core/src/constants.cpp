#include "qdtherm/constants.hpp"

#include <cmath>

namespace qdtherm {

void PhysicalConstants::validate() const {
    detail::require(std::isfinite(k_b) && k_b > 0, "constants.k_b: must be positive and finite");
    detail::require(std::isfinite(hbar) && hbar > 0, "constants.hbar: must be positive and finite");
    detail::require(std::isfinite(m_eff) && m_eff > 0, "constants.m_eff: must be positive and finite");
}

}  // namespace qdtherm
