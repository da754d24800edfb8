#pragma once

#include <optional>
#include <string>

namespace chirpsim {

/// Dimensionful description of the driven circuit and its bath.
struct PhysicalParams {
    double inductance = 0.0;        ///< total inductance L [H]
    double critical_current = 0.0;  ///< junction critical current I0 [A]
    double resonance_omega = 0.0;   ///< linear resonance omega [rad/s]
    double quality = 0.0;           ///< total quality factor (dimensionless)
    double bath_temperature = 0.0;  ///< bath temperature T [K]
    double chirp_rate = 0.0;        ///< angular chirp rate alpha [rad/s^2]

    // Calibration metadata, not used by any computation.
    std::optional<double> quality_internal;
    std::optional<double> quality_external;
    std::optional<double> critical_power; ///< bifurcation critical power [W]

    /// Throws invalid_parameter if any field is outside its domain.
    void validate() const;
};

/// Reduced model constants; everything downstream runs on these.
///
/// q0/j0/t_eff anchor the dimensionless system to a physical circuit.
/// Parameters built directly in dimensionless space leave them at zero,
/// in which case voltage conversions are unavailable.
struct DimensionlessParams {
    double beta = 0.0;        ///< quartic anharmonicity
    double epsilon = 0.0;     ///< drive amplitude
    double gamma = 0.0;       ///< quantumness hbar*omega/(kB*T_eff), in (0, 2]
    double alpha_tilde = 0.0; ///< chirp rate alpha/omega^2
    double q0 = 0.0;          ///< normalization charge [C]
    double j0 = 0.0;          ///< normalization current [A]
    double t_eff = 0.0;       ///< effective temperature [K]

    [[nodiscard]] bool has_physical_anchor() const { return q0 > 0.0; }

    void validate() const;
};

/// Quantum effective temperature (hbar*omega/2kB)*coth(hbar*omega/2kB*T).
/// Returns the T = 0 limit hbar*omega/(2 kB) exactly at T = 0.
double effective_temperature(double temperature, double omega);

/// Maps circuit parameters and a drive voltage onto the reduced model.
DimensionlessParams reduce(const PhysicalParams& p, double drive_voltage_v);

/// Inverse of reduce() in the epsilon <-> V_d direction.
double drive_voltage(const PhysicalParams& p, double epsilon);

/// Drive voltage scale L*q0*omega^2 [V] for a given circuit; epsilon times
/// this is the physical drive voltage.
double voltage_scale(const PhysicalParams& p);

/// Named circuit presets.  "6GHz" is the measured device; "1.6GHz" reuses
/// the 6GHz circuit values for the lower-frequency resonator, for which no
/// full parameter set is published, and is only good for scaling studies.
PhysicalParams circuit_preset(const std::string& name);

} // namespace chirpsim
