#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "chirpsim/constants.hpp"
#include "chirpsim/errors.hpp"
#include "chirpsim/fit.hpp"
#include "chirpsim/rng.hpp"
#include "chirpsim/threshold.hpp"
#include "chirpsim/units.hpp"

using namespace chirpsim;

namespace {

double erf_model(double eps, double eps_c, double s) {
    return 0.5 * (1.0 + std::erf((eps - eps_c) / (std::sqrt(2.0) * s)));
}

ThresholdCurve synthetic_curve(const std::vector<double>& eps_grid, double eps_c,
                               double s, std::uint64_t n_per_point,
                               std::uint64_t noise_seed, bool with_noise) {
    ThresholdCurve curve;
    std::uint64_t ctr = 0;
    for (const double e : eps_grid) {
        const double p = erf_model(e, eps_c, s);
        std::uint64_t k = 0;
        if (with_noise) {
            for (std::uint64_t i = 0; i < n_per_point; ++i) {
                const auto r = philox::block(noise_seed, ctr++);
                if (uniform_from_bits(r[0], r[1]) < p) ++k;
            }
        } else {
            k = static_cast<std::uint64_t>(std::llround(
                p * static_cast<double>(n_per_point)));
        }
        const auto ci = wilson_ci(k, n_per_point);
        ThresholdPoint pt;
        pt.epsilon = e;
        pt.n_locked = k;
        pt.n_total = n_per_point;
        pt.p_hat = static_cast<double>(k) / static_cast<double>(n_per_point);
        pt.ci_lo = ci.lo;
        pt.ci_hi = ci.hi;
        curve.points.push_back(pt);
    }
    return curve;
}

std::vector<double> grid_around(double center, double half, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = center - half + 2.0 * half * static_cast<double>(i) /
                                   static_cast<double>(n - 1);
    }
    return g;
}

} // namespace

TEST_CASE("wilson interval reference values") {
    // 50/100 at 95%: the standard textbook value
    const auto ci = wilson_ci(50, 100);
    CHECK(ci.lo == doctest::Approx(0.4038).epsilon(2e-3));
    CHECK(ci.hi == doctest::Approx(0.5962).epsilon(2e-3));
    // zero successes still give a nonzero upper limit: z^2/(n + z^2)
    const auto zero = wilson_ci(0, 100);
    CHECK(zero.lo == 0.0);
    const double z2 = 1.959963984540054 * 1.959963984540054;
    CHECK(zero.hi == doctest::Approx(z2 / (100.0 + z2)).epsilon(1e-9));
    const auto one = wilson_ci(100, 100);
    CHECK(one.hi == 1.0);
    CHECK(one.lo == doctest::Approx(1.0 - z2 / (100.0 + z2)).epsilon(1e-9));
    CHECK_THROWS_AS(wilson_ci(5, 0), invalid_parameter);
    CHECK_THROWS_AS(wilson_ci(5, 4), invalid_parameter);
}

TEST_CASE("probability_from_average linear map") {
    CHECK(probability_from_average(1.0, 1.0, 3.0) == 0.0);
    CHECK(probability_from_average(3.0, 1.0, 3.0) == 1.0);
    CHECK(probability_from_average(2.0, 1.0, 3.0) == doctest::Approx(0.5));
    CHECK(probability_from_average(0.5, 1.0, 3.0) == 0.0); // clamped
    CHECK(probability_from_average(9.0, 1.0, 3.0) == 1.0); // clamped
    CHECK_THROWS_AS(probability_from_average(1.0, 2.0, 2.0), invalid_parameter);
}

TEST_CASE("erf fit recovers exact-model data to 1e-10") {
    const auto grid = grid_around(0.02, 0.004, 11);
    ThresholdCurve curve = synthetic_curve(grid, 0.02, 0.001, 1000000, 0, false);
    const ErfFitResult fit = fit_threshold(curve);
    CHECK(fit.eps_c == doctest::Approx(0.02).epsilon(1e-10));
    CHECK(fit.s == doctest::Approx(0.001).epsilon(1e-6));
    CHECK(fit.width == doctest::Approx(0.001 * std::sqrt(2.0 * constants::pi))
                           .epsilon(1e-6));
}

TEST_CASE("erf fit handles a zero-width step without crashing") {
    const auto grid = grid_around(0.02, 0.004, 10);
    ThresholdCurve curve;
    for (const double e : grid) {
        ThresholdPoint pt;
        pt.epsilon = e;
        pt.n_total = 5000;
        pt.n_locked = e > 0.02 ? 5000 : 0;
        pt.p_hat = e > 0.02 ? 1.0 : 0.0;
        const auto ci = wilson_ci(pt.n_locked, pt.n_total);
        pt.ci_lo = ci.lo;
        pt.ci_hi = ci.hi;
        curve.points.push_back(pt);
    }
    const ErfFitResult fit = fit_threshold(curve);
    const double spacing = grid[1] - grid[0];
    CHECK(fit.width < spacing);
    CHECK(fit.eps_c > 0.019);
    CHECK(fit.eps_c < 0.021);
}

TEST_CASE("erf fit rejects non-spanning curves") {
    // all points on one side of the transition
    const auto grid = grid_around(0.03, 0.002, 8);
    ThresholdCurve curve = synthetic_curve(grid, 0.02, 0.001, 5000, 0, false);
    CHECK_THROWS_AS(fit_threshold(curve), invalid_parameter);

    // points with too few samples are dropped entirely
    ThresholdCurve thin = synthetic_curve(grid_around(0.02, 0.004, 8), 0.02,
                                          0.001, 20, 0, false);
    CHECK_THROWS_AS(fit_threshold(thin), invalid_parameter);
}

TEST_CASE("erf fit is calibrated against binomial noise") {
    // Parametric check: with N = 5000 per point the estimate should land
    // within 3 quoted standard errors essentially always.  Seeds are fixed,
    // so this is a deterministic regression of estimator + error bars.
    const auto grid = grid_around(0.02, 0.0035, 9);
    int ok = 0;
    const int n_seeds = 40;
    for (int seed = 0; seed < n_seeds; ++seed) {
        ThresholdCurve curve = synthetic_curve(
            grid, 0.02, 0.001, 5000, 7000 + static_cast<std::uint64_t>(seed), true);
        const ErfFitResult fit = fit_threshold(curve);
        if (std::abs(fit.eps_c - 0.02) <= 3.0 * fit.se_eps_c) ++ok;
    }
    CHECK(ok >= 38);
}

TEST_CASE("weighted line fit recovers slope and intercept") {
    std::vector<double> x{0, 1, 2, 3, 4, 5};
    std::vector<double> y;
    y.reserve(x.size());
    for (double xi : x) y.push_back(2.5 * xi - 0.75);
    const LineFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(-0.75).epsilon(1e-12));
}

TEST_CASE("predicted width formulas") {
    PhysicalParams p = circuit_preset("6GHz");
    // regression pin, CODATA constants through the closed formula
    CHECK(predicted_width_volts(p) ==
          doctest::Approx(1.47922e-9).epsilon(1e-5));

    // width ratio between temperatures is sqrt(T_eff ratio)
    PhysicalParams p1 = p, p2 = p;
    p1.bath_temperature = 0.3;
    p2.bath_temperature = 1.2;
    const double ratio = predicted_width_volts(p1) / predicted_width_volts(p2);
    const double t1 = effective_temperature(0.3, p.resonance_omega);
    const double t2 = effective_temperature(1.2, p.resonance_omega);
    CHECK(ratio == doctest::Approx(std::sqrt(t1 / t2)).epsilon(1e-12));

    // width scales exactly as sqrt(alpha)
    PhysicalParams pa = p;
    pa.chirp_rate *= 4.0;
    CHECK(predicted_width_volts(pa) ==
          doctest::Approx(2.0 * predicted_width_volts(p)).epsilon(1e-12));
    CHECK(predicted_width_eps(4e-6) ==
          doctest::Approx(2.0 * predicted_width_eps(1e-6)).epsilon(1e-12));

    // dimensionless and voltage forms agree through the voltage scale
    const DimensionlessParams dp = reduce(p, 0.0);
    CHECK(predicted_width_eps(dp.alpha_tilde) * voltage_scale(p) ==
          doctest::Approx(predicted_width_volts(p)).epsilon(1e-12));
}
