#pragma once

#include <numbers>

namespace chirpsim::constants {

inline constexpr double pi = std::numbers::pi;

/// Reduced Planck constant [J s].
inline constexpr double hbar = 1.054571817e-34;

/// Boltzmann constant [J/K].
inline constexpr double k_boltzmann = 1.380649e-23;

/// Elementary charge [C].
inline constexpr double electron_charge = 1.602176634e-19;

/// Reduced flux quantum hbar/2e [Wb].
inline constexpr double flux_quantum_reduced = hbar / (2.0 * electron_charge);

} // namespace chirpsim::constants
