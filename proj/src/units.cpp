#include "chirpsim/units.hpp"

#include <cmath>
#include <vector>

#include "chirpsim/constants.hpp"
#include "chirpsim/errors.hpp"

namespace chirpsim {

namespace {

void require(std::vector<std::string>& issues, bool ok, const char* msg) {
    if (!ok) issues.emplace_back(msg);
}

} // namespace

void PhysicalParams::validate() const {
    std::vector<std::string> issues;
    require(issues, inductance > 0.0, "inductance must be > 0");
    require(issues, critical_current > 0.0, "critical current must be > 0");
    require(issues, resonance_omega > 0.0, "resonance frequency must be > 0");
    require(issues, quality > 1.0, "quality factor must be > 1");
    require(issues, bath_temperature >= 0.0, "bath temperature must be >= 0");
    require(issues, chirp_rate > 0.0, "chirp rate must be > 0");
    if (!issues.empty()) {
        std::string msg = "invalid circuit parameters:";
        for (const auto& s : issues) msg += " " + s + ";";
        throw invalid_parameter(msg);
    }
}

void DimensionlessParams::validate() const {
    if (!(beta > 0.0)) throw invalid_parameter("beta must be > 0");
    if (!(alpha_tilde > 0.0)) throw invalid_parameter("alpha_tilde must be > 0");
    if (!(epsilon >= 0.0)) throw invalid_parameter("epsilon must be >= 0");
    if (!(gamma > 0.0 && gamma <= 2.0)) throw invalid_parameter("gamma must be in (0, 2]");
}

double effective_temperature(double temperature, double omega) {
    if (temperature < 0.0) throw invalid_parameter("temperature must be >= 0");
    if (!(omega > 0.0)) throw invalid_parameter("omega must be > 0");

    const double zero_point = 0.5 * constants::hbar * omega / constants::k_boltzmann;
    if (temperature == 0.0) return zero_point;
    // coth(x) with x = hbar*omega/(2 kB T); tanh saturates cleanly for large x.
    const double x = zero_point / temperature;
    return zero_point / std::tanh(x);
}

DimensionlessParams reduce(const PhysicalParams& p, double drive_voltage_v) {
    p.validate();
    if (drive_voltage_v < 0.0) throw invalid_parameter("drive voltage must be >= 0");

    DimensionlessParams d;
    d.t_eff = effective_temperature(p.bath_temperature, p.resonance_omega);
    d.j0 = std::sqrt(constants::k_boltzmann * d.t_eff / p.inductance);
    d.q0 = d.j0 / p.resonance_omega;
    d.gamma = constants::hbar * p.resonance_omega / (constants::k_boltzmann * d.t_eff);
    d.alpha_tilde = p.chirp_rate / (p.resonance_omega * p.resonance_omega);
    const double w2 = p.resonance_omega * p.resonance_omega;
    const double i0_cubed = p.critical_current * p.critical_current * p.critical_current;
    d.beta = constants::flux_quantum_reduced * w2 * d.q0 * d.q0 /
             (6.0 * p.inductance * i0_cubed);
    d.epsilon = drive_voltage_v / (p.inductance * d.q0 * w2);
    return d;
}

double voltage_scale(const PhysicalParams& p) {
    p.validate();
    const double t_eff = effective_temperature(p.bath_temperature, p.resonance_omega);
    const double j0 = std::sqrt(constants::k_boltzmann * t_eff / p.inductance);
    const double q0 = j0 / p.resonance_omega;
    return p.inductance * q0 * p.resonance_omega * p.resonance_omega;
}

double drive_voltage(const PhysicalParams& p, double epsilon) {
    if (epsilon < 0.0) throw invalid_parameter("epsilon must be >= 0");
    return epsilon * voltage_scale(p);
}

PhysicalParams circuit_preset(const std::string& name) {
    PhysicalParams p;
    p.inductance = 2.3e-9;
    p.critical_current = 1.8e-6;
    p.quality = 8230.0;
    p.quality_internal = 17200.0;
    p.quality_external = 15800.0;
    p.bath_temperature = 0.0;
    p.chirp_rate = 2.0 * constants::pi * 50.6e12; // 50.6 MHz/us, angular
    if (name == "6GHz") {
        p.resonance_omega = 2.0 * constants::pi * 5.987e9;
    } else if (name == "1.6GHz") {
        // Circuit values reused from the 6GHz device; stand-in only.
        p.resonance_omega = 2.0 * constants::pi * 1.6e9;
    } else {
        throw invalid_parameter("unknown circuit preset: " + name);
    }
    return p;
}

} // namespace chirpsim
