#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "chirpsim/chirp.hpp"
#include "chirpsim/units.hpp"

namespace chirpsim {

enum class LockClass { Locked, Unlocked };

struct OscState {
    double q = 0.0;   ///< dimensionless charge
    double j = 0.0;   ///< dimensionless current
    double tau = 0.0; ///< dimensionless time
};

struct TrajectorySample {
    double tau = 0.0;
    double q = 0.0;
    double j = 0.0;
    double phase_mismatch = 0.0;
};

struct Outcome {
    LockClass classification = LockClass::Unlocked;
    OscState final_state;
    double final_amplitude = 0.0;
    std::vector<TrajectorySample> history; ///< empty unless sampling requested
};

/// Right-hand side of the trajectory equations (the characteristics of the
/// phase-space transport): dq/dtau = j, dj/dtau = -q + beta q^3
/// - eps cos(phi_d) - damping j.
std::pair<double, double> derivative(const OscState& s, const DimensionlessParams& dp,
                                     const ChirpProfile& c, double damping = 0.0);

/// Oscillator-drive phase mismatch atan2(-j, q) - phi_d(tau), wrapped to
/// (-pi, pi].  Zero amplitude maps to 0 by convention.
double phase_mismatch(const OscState& s, const ChirpProfile& c);

/// Amplitude of the adiabatic phase-locked orbit, sqrt(8*alpha_tilde*tau/(3*beta)).
double adiabatic_locked_amplitude(double alpha_tilde, double beta, double tau);

/// Locked iff the final action exceeds half the adiabatic locked action,
/// A^2 > 4*alpha_tilde*tau_end/(3*beta).  Requires final.tau == c.tau_end.
LockClass classify(const OscState& final_state, const DimensionlessParams& dp,
                   const ChirpProfile& c);

/// Conserved energy of the undriven, undamped system.
inline double oscillator_energy(const OscState& s, double beta) {
    const double q2 = s.q * s.q;
    return 0.5 * s.j * s.j + 0.5 * q2 - 0.25 * beta * q2 * q2;
}

/// Fixed-step RK4 from initial.tau to c.tau_end.  dtau must be in (0, 0.05].
/// sample_every > 0 records every that many steps into Outcome::history.
/// Throws numerical_error naming tau if the state becomes non-finite.
Outcome integrate(const OscState& initial, const DimensionlessParams& dp,
                  const ChirpProfile& c, double dtau, double damping = 0.0,
                  std::int64_t sample_every = 0);

/// Advances a batch of trajectories in lockstep over the shared drive.
/// q/j/eps are parallel per-lane arrays; all lanes start at tau0 and end at
/// tau_end.  The active kernel backend does the arithmetic; results are
/// identical for every backend and lane batching.
void integrate_batch(std::span<double> q, std::span<double> j,
                     std::span<const double> eps, double tau0, double tau_end,
                     double dtau, double beta, double alpha_tilde,
                     double damping = 0.0);

} // namespace chirpsim
