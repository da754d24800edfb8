#include "chirpsim/chirp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chirpsim/errors.hpp"

namespace chirpsim {

namespace {

double detuning_requirement(double alpha_tilde, std::optional<double> quality) {
    if (quality) return 20.0 / *quality;
    return 10.0 * std::sqrt(alpha_tilde);
}

} // namespace

void ChirpProfile::validate(std::optional<double> quality) const {
    if (!(alpha_tilde > 0.0)) throw invalid_parameter("alpha_tilde must be > 0");
    if (!(tau_start < 0.0 && tau_end > 0.0)) {
        throw invalid_parameter("chirp window must satisfy tau_start < 0 < tau_end");
    }
    const double req = detuning_requirement(alpha_tilde, quality);
    const double start_det = alpha_tilde * -tau_start;
    const double end_det = alpha_tilde * tau_end;
    if (start_det <= req || end_det <= req) {
        throw invalid_parameter(
            "chirp start/stop detunings (" + std::to_string(start_det) + ", " +
            std::to_string(end_det) + ") must exceed " + std::to_string(req));
    }
}

ChirpProfile ChirpProfile::auto_window(double alpha_tilde,
                                       std::optional<double> quality,
                                       double tau_end_min) {
    if (!(alpha_tilde > 0.0)) throw invalid_parameter("alpha_tilde must be > 0");
    const double req_tau = 1.2 * detuning_requirement(alpha_tilde, quality) / alpha_tilde;
    const double xi = 1.0 / std::sqrt(alpha_tilde);
    ChirpProfile c;
    c.alpha_tilde = alpha_tilde;
    c.tau_start = -std::max(req_tau, 4.0 * xi);
    c.tau_end = std::max({req_tau, 6.0 * xi, tau_end_min});
    c.validate(quality);
    return c;
}

} // namespace chirpsim
