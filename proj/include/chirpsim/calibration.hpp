#pragma once

namespace chirpsim::calibration {

// Model constants measured with this package's own deterministic and
// Monte Carlo solvers (see tests/ for the measurement procedures).  They
// seed bracket searches and default scale factors; nothing downstream
// depends on them being exact.

/// Capture threshold prefactor C in eps_c ~= C * alpha_tilde^(3/4) / sqrt(beta).
inline constexpr double threshold_prefactor = 1.22;

/// Fluctuation-broadening prefactor kappa in the transition-width relation
/// width_eps = 2*kappa*sqrt(2*pi*alpha_tilde)*sigma, measured from the
/// Monte Carlo width at the reference point beta = 3.55e-6,
/// alpha_tilde = 1e-6, sigma = 1.
inline constexpr double kappa = 0.245;

} // namespace chirpsim::calibration
