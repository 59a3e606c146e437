#pragma once

#include <optional>

namespace selfgrav {

/// Every functional of a state in one place. The reduced entries are always
/// present; the phase-space entries appear once a state has been lifted
/// against a concrete Q.
struct EnergyReport {
    double internal = 0.0;      ///< int Phi(rho) dx
    double epot = 0.0;          ///< potential energy (negative)
    double reduced_total = 0.0; ///< internal + epot

    std::optional<double> casimir;   ///< int int Q(f)
    std::optional<double> kinetic;   ///< (1/2) int int |v|^2 f
    std::optional<double> total;     ///< casimir + kinetic + epot
    std::optional<double> gap;       ///< total - reduced_total (>= 0, ~0 for minimizers)
};

} // namespace selfgrav
