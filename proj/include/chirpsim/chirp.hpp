#pragma once

#include <optional>

namespace chirpsim {

/// Linear frequency chirp through resonance.
///
/// The instantaneous drive frequency is nu(tau) = 1 - alpha_tilde*tau, so
/// resonance (nu = 1) is crossed at tau = 0 and the drive phase is
/// phi_d(tau) = tau - alpha_tilde*tau^2/2.  tau_start < 0 < tau_end, with
/// both endpoints detuned well outside the capture window.
struct ChirpProfile {
    double alpha_tilde = 0.0;
    double tau_start = 0.0;
    double tau_end = 0.0;

    [[nodiscard]] double phase(double tau) const {
        return tau - 0.5 * alpha_tilde * tau * tau;
    }

    [[nodiscard]] double frequency(double tau) const {
        return 1.0 - alpha_tilde * tau;
    }

    /// Start/stop detuning requirement: 20 linewidths when a quality factor
    /// is known, else 10x the sweep bandwidth sqrt(alpha_tilde).  Throws
    /// invalid_parameter on violation.
    void validate(std::optional<double> quality = std::nullopt) const;

    /// Window satisfying validate() with 20% margin.  tau_end is stretched
    /// to at least 6/sqrt(alpha_tilde) so capture is decided and, when
    /// given, to tau_end_min (e.g. a requested snapshot time).
    static ChirpProfile auto_window(double alpha_tilde,
                                    std::optional<double> quality = std::nullopt,
                                    double tau_end_min = 0.0);
};

} // namespace chirpsim
