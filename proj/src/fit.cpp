#include "chirpsim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "chirpsim/constants.hpp"
#include "chirpsim/errors.hpp"

namespace chirpsim {

WilsonInterval wilson_ci(std::uint64_t successes, std::uint64_t total, double z) {
    if (total == 0) throw invalid_parameter("wilson_ci requires total > 0");
    if (successes > total) throw invalid_parameter("successes cannot exceed total");
    const double n = static_cast<double>(total);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // rounding must not push the interval off the estimate or out of [0, 1]
    const double lo = std::clamp(center - half, 0.0, p);
    const double hi = std::clamp(center + half, p, 1.0);
    return {lo, hi};
}

LineFit fit_line(std::span<const double> x, std::span<const double> y,
                 std::span<const double> w) {
    if (x.size() != y.size() || x.size() < 2) {
        throw invalid_parameter("fit_line needs >= 2 points");
    }
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        sw += wi;
        sx += wi * x[i];
        sy += wi * y[i];
        sxx += wi * x[i] * x[i];
        sxy += wi * x[i] * y[i];
    }
    const double det = sw * sxx - sx * sx;
    if (det <= 0.0) throw numerical_error("fit_line: degenerate abscissae");
    LineFit f;
    f.slope = (sw * sxy - sx * sy) / det;
    f.intercept = (sxx * sy - sx * sxy) / det;

    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double wi = w.empty() ? 1.0 : w[i];
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        ssr += wi * r * r;
    }
    const double dof = static_cast<double>(x.size()) - 2.0;
    const double scale = dof > 0 ? ssr / dof : 0.0;
    f.se_slope = std::sqrt(scale * sw / det);
    f.se_intercept = std::sqrt(scale * sxx / det);
    return f;
}

namespace {

inline double erf_model(double eps, double eps_c, double s) {
    if (s <= 0.0) return eps >= eps_c ? 1.0 : 0.0;
    return 0.5 * (1.0 + std::erf((eps - eps_c) / (std::sqrt(2.0) * s)));
}

inline double gauss_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * constants::pi);
}

double weighted_ssr(std::span<const double> eps, std::span<const double> p,
                    std::span<const double> w, double eps_c, double s) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double r = p[i] - erf_model(eps[i], eps_c, s);
        ssr += w[i] * r * r;
    }
    return ssr;
}

} // namespace

ErfFitResult fit_erf_profile(std::span<const double> eps, std::span<const double> p,
                             std::span<const double> weight) {
    const std::size_t n = eps.size();
    if (n < 3 || p.size() != n || weight.size() != n) {
        throw invalid_parameter("fit_erf_profile needs >= 3 matched points");
    }

    const double span = eps.back() - eps.front();
    if (!(span > 0.0)) throw invalid_parameter("eps grid must be increasing");

    // Starting point: interpolated P = 0.5 crossing and the 16-84% spread.
    auto crossing = [&](double level) -> double {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if ((p[i] - level) * (p[i + 1] - level) <= 0.0 && p[i] != p[i + 1]) {
                const double t = (level - p[i]) / (p[i + 1] - p[i]);
                return eps[i] + t * (eps[i + 1] - eps[i]);
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    double eps_c = crossing(0.5);
    if (!std::isfinite(eps_c)) eps_c = 0.5 * (eps.front() + eps.back());
    double s;
    {
        const double lo = crossing(0.16);
        const double hi = crossing(0.84);
        s = (std::isfinite(lo) && std::isfinite(hi) && hi > lo) ? 0.5 * (hi - lo)
                                                                : span / 8.0;
        s = std::max(s, 1e-9 * span);
    }

    double ssr = weighted_ssr(eps, p, weight, eps_c, s);
    double lambda = 1e-6;
    int it = 0;
    const int max_iter = 300;
    bool converged = false;
    for (; it < max_iter; ++it) {
        // Normal equations for the two parameters.
        double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double z = (eps[i] - eps_c) / s;
            const double g = gauss_pdf(z) / s;
            const double d_epsc = -g;
            const double d_s = -z * g;
            const double r = p[i] - erf_model(eps[i], eps_c, s);
            a11 += weight[i] * d_epsc * d_epsc;
            a12 += weight[i] * d_epsc * d_s;
            a22 += weight[i] * d_s * d_s;
            b1 += weight[i] * d_epsc * r;
            b2 += weight[i] * d_s * r;
        }
        const double a11d = a11 * (1.0 + lambda);
        const double a22d = a22 * (1.0 + lambda);
        const double det = a11d * a22d - a12 * a12;
        if (!(std::abs(det) > 0.0)) {
            // Jacobian vanished: the data is an (effectively) exact step and
            // the model has saturated everywhere.
            converged = true;
            break;
        }
        const double d_epsc = (a22d * b1 - a12 * b2) / det;
        const double d_s = (a11d * b2 - a12 * b1) / det;

        double new_eps_c = eps_c + d_epsc;
        double new_s = s + d_s;
        if (new_s <= 0.0) new_s = 0.5 * s;
        const double new_ssr = weighted_ssr(eps, p, weight, new_eps_c, new_s);
        if (new_ssr <= ssr) {
            const double step_scale =
                std::abs(d_epsc) / std::max(std::abs(eps_c), span) +
                std::abs(d_s) / std::max(s, 1e-12 * span);
            eps_c = new_eps_c;
            s = new_s;
            ssr = new_ssr;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (step_scale < 1e-12) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                converged = true; // no descent direction left
                break;
            }
        }
    }
    if (!converged && it == max_iter && ssr > 1e-12 * static_cast<double>(n)) {
        throw numerical_error("fit_erf_profile failed to converge; residual = " +
                              std::to_string(ssr));
    }

    ErfFitResult out;
    out.eps_c = eps_c;
    out.s = s;
    out.width = s * std::sqrt(2.0 * constants::pi);
    out.residual = ssr;
    out.iterations = it;

    // Parameter covariance from the final Jacobian, scaled by the reduced
    // chi-square so the quoted errors stay honest with imperfect weights.
    double a11 = 0, a12 = 0, a22 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = (eps[i] - eps_c) / s;
        const double g = gauss_pdf(z) / s;
        a11 += weight[i] * g * g;
        a12 += weight[i] * g * (z * g);
        a22 += weight[i] * (z * g) * (z * g);
    }
    const double det = a11 * a22 - a12 * a12;
    if (det > 0.0) {
        const double dof = std::max(1.0, static_cast<double>(n) - 2.0);
        const double scale = std::max(ssr / dof, 1.0); // >= nominal binomial errors
        out.se_eps_c = std::sqrt(scale * a22 / det);
        out.se_s = std::sqrt(scale * a11 / det);
    }
    return out;
}

} // namespace chirpsim
