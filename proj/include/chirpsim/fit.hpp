#pragma once

#include <cstdint>
#include <span>

namespace chirpsim {

struct WilsonInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for a binomial proportion (default 95%).
WilsonInterval wilson_ci(std::uint64_t successes, std::uint64_t total,
                         double z = 1.959963984540054);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double se_slope = 0.0;
    double se_intercept = 0.0;
};

/// Weighted least-squares line y = slope*x + intercept.  Pass an empty
/// weight span for the unweighted fit.
LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> w = {});

struct ErfFitResult {
    double eps_c = 0.0;    ///< P = 1/2 location
    double s = 0.0;        ///< Gaussian width of the transition
    double width = 0.0;    ///< inverse slope at P = 1/2, s*sqrt(2*pi)
    double residual = 0.0; ///< weighted sum of squared residuals
    double se_eps_c = 0.0;
    double se_s = 0.0;
    int iterations = 0;
};

/// Weighted least-squares fit of P(eps) = (1 + erf((eps - eps_c)/(sqrt(2) s)))/2.
/// Gauss-Newton with Levenberg damping; throws numerical_error when the
/// iteration fails to converge on data that is not an exact step.
ErfFitResult fit_erf_profile(std::span<const double> eps, std::span<const double> p,
                             std::span<const double> weight);

} // namespace chirpsim
