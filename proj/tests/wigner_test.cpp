#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <vector>

#include "chirpsim/constants.hpp"
#include "chirpsim/dynamics.hpp"
#include "chirpsim/errors.hpp"
#include "chirpsim/rng.hpp"
#include "chirpsim/threshold.hpp"
#include "chirpsim/wigner.hpp"

using namespace chirpsim;

namespace {

DimensionlessParams dimless(double beta, double alpha_tilde, double eps) {
    DimensionlessParams dp;
    dp.beta = beta;
    dp.alpha_tilde = alpha_tilde;
    dp.epsilon = eps;
    dp.gamma = 2.0;
    return dp;
}

PhaseSpaceGrid small_grid(int n, double half) {
    PhaseSpaceGrid g;
    g.n_q = n;
    g.n_j = n;
    g.q_half = half;
    g.j_half = half;
    return g;
}

/// Gaussian blob of per-quadrature variance var at (q0, j0).
WignerState displaced_gaussian(const PhaseSpaceGrid& g, double q0, double j0,
                               double var, double tau0) {
    WignerState s;
    s.grid = g;
    s.tau = tau0;
    s.gamma = 2.0 * var;
    s.f.resize(static_cast<std::size_t>(g.n_q) * g.n_j);
    const double norm = 1.0 / (2.0 * constants::pi * var);
    for (int iq = 0; iq < g.n_q; ++iq) {
        for (int ij = 0; ij < g.n_j; ++ij) {
            const double dq = g.q_at(iq) - q0;
            const double dj = g.j_at(ij) - j0;
            s.f[static_cast<std::size_t>(iq) * g.n_j + ij] =
                norm * std::exp(-(dq * dq + dj * dj) / (2.0 * var));
        }
    }
    return s;
}

ChirpProfile flat_window(double alpha_tilde, double t0, double t1) {
    ChirpProfile c;
    c.alpha_tilde = alpha_tilde;
    c.tau_start = t0;
    c.tau_end = t1;
    return c;
}

} // namespace

TEST_CASE("grid validation") {
    PhaseSpaceGrid g = small_grid(100, 8.0); // not a power of two
    CHECK_THROWS_AS(g.validate(1e-6, 3.55e-6, 100.0), invalid_parameter);
    g = small_grid(32, 8.0); // too small
    CHECK_THROWS_AS(g.validate(1e-6, 3.55e-6, 100.0), invalid_parameter);
    g = small_grid(64, 1.0); // box smaller than the locked orbit
    CHECK_THROWS_AS(g.validate(1e-6, 3.55e-6, 1e4), invalid_parameter);
    const PhaseSpaceGrid auto_g = PhaseSpaceGrid::for_capture(256, 1e-6, 25.0 * 3.55e-6, 4215.0);
    CHECK(auto_g.q_half ==
          doctest::Approx(1.6 * adiabatic_locked_amplitude(1e-6, 25.0 * 3.55e-6, 4215.0)));
}

TEST_CASE("ground state moments, normalization, positivity") {
    const PhaseSpaceGrid g = small_grid(128, 8.0);
    const WignerState s = ground_state(g, 2.0);
    const double area = g.cell_area();
    double mass = 0, q2 = 0, minv = 1e300;
    for (int iq = 0; iq < g.n_q; ++iq) {
        for (int ij = 0; ij < g.n_j; ++ij) {
            const double v = s.real_at(iq, ij);
            mass += v;
            q2 += g.q_at(iq) * g.q_at(iq) * v;
            minv = std::min(minv, v);
        }
    }
    CHECK(mass * area == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(q2 * area == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(minv >= 0.0);

    // narrower quantum parameter, same checks
    const WignerState s2 = ground_state(g, 0.5);
    CHECK(diagnose(s2, dimless(1e-3, 1e-6, 0), flat_window(1e-6, -1, 1)).norm ==
          doctest::Approx(1.0).epsilon(1e-8));

    CHECK_THROWS_AS(ground_state(small_grid(64, 2.0), 2.0), config_error);
    CHECK_THROWS_AS(ground_state(g, 0.0), invalid_parameter);
    CHECK_THROWS_AS(ground_state(g, 2.5), invalid_parameter);
}

TEST_CASE("vacuum is stationary under harmonic evolution") {
    const PhaseSpaceGrid g = small_grid(64, 8.0);
    const auto dp = dimless(1e-300, 1e-6, 0.0);
    const ChirpProfile c = flat_window(1e-6, -10, 1e6);
    WignerState init = ground_state(g, 2.0, 0.0);
    const std::vector<std::complex<double>> f0 = init.f;
    WignerSolver solver(dp, c, 2.0, 0.005, std::move(init));
    solver.evolve_to(5.0, 1.0); // 1000 steps
    double max_dev = 0.0;
    for (std::size_t i = 0; i < f0.size(); ++i) {
        max_dev = std::max(max_dev, std::abs(solver.state().f[i] - f0[i]));
    }
    CHECK(max_dev < 1e-8);
}

TEST_CASE("displaced gaussian rotates at the harmonic frequency") {
    const PhaseSpaceGrid g = small_grid(128, 10.0);
    const auto dp = dimless(1e-300, 1e-6, 0.0);
    const ChirpProfile c = flat_window(1e-6, -10, 1e6);
    const double q0 = 2.0;
    const double tau_target = 6.0 * constants::pi; // three periods

    auto centroid_error = [&](double dtau) {
        WignerSolver solver(dp, c, 2.0, dtau,
                            displaced_gaussian(g, q0, 0.0, 0.5, 0.0));
        solver.evolve_to(tau_target, tau_target);
        const auto d = solver.diagnostics();
        const double qe = q0 * std::cos(tau_target);
        const double je = -q0 * std::sin(tau_target);
        return std::hypot(d.mean_q - qe, d.mean_j - je);
    };

    const double e1 = centroid_error(0.02);
    const double e2 = centroid_error(0.01);
    CHECK(e1 < 1e-3);
    // Strang splitting is second order: halving the step quarters the error
    const double ratio = e1 / e2;
    CHECK(ratio > 3.0);
    CHECK(ratio < 5.5);
}

TEST_CASE("one solver step matches the transport equation (finite differences)") {
    // Pins every sign in the spectral multipliers, including the cubic
    // quantum term, against a finite-difference evaluation of the RHS.
    const int n = 128;
    const PhaseSpaceGrid g = small_grid(n, 8.0);
    const auto dp = dimless(0.02, 1e-6, 0.03);
    const ChirpProfile c = flat_window(1e-6, -10, 1e6);
    const double gamma = 2.0;
    const double tau0 = 0.3;
    const double dtau = 1e-4;

    const WignerState init = displaced_gaussian(g, 1.5, -0.8, 0.5, tau0);
    WignerState before = init;
    WignerSolver solver(dp, c, gamma, dtau, std::move(before));
    solver.evolve_to(tau0 + dtau, dtau);
    const WignerState& after = solver.state();

    const double dq = g.dq(), dj = g.dj();
    const double drive = dp.epsilon * std::cos(c.phase(tau0 + 0.5 * dtau));
    auto at = [&](int iq, int ij) {
        const int a = (iq + n) % n;
        const int b = (ij + n) % n;
        return init.f[static_cast<std::size_t>(a) * n + b].real();
    };
    double num = 0.0, den = 0.0;
    for (int iq = 2; iq < n - 2; ++iq) {
        const double q = g.q_at(iq);
        const double force = q - dp.beta * q * q * q + drive;
        const double qc = gamma * gamma * dp.beta * q / 4.0;
        for (int ij = 2; ij < n - 2; ++ij) {
            const double j = g.j_at(ij);
            const double dfdq = (8.0 * (at(iq + 1, ij) - at(iq - 1, ij)) -
                                 (at(iq + 2, ij) - at(iq - 2, ij))) /
                                (12.0 * dq);
            const double dfdj = (8.0 * (at(iq, ij + 1) - at(iq, ij - 1)) -
                                 (at(iq, ij + 2) - at(iq, ij - 2))) /
                                (12.0 * dj);
            const double d3fdj3 = (at(iq, ij + 2) - 2.0 * at(iq, ij + 1) +
                                   2.0 * at(iq, ij - 1) - at(iq, ij - 2)) /
                                  (2.0 * dj * dj * dj);
            const double rhs = -j * dfdq + force * dfdj + qc * d3fdj3;
            const double lhs =
                (after.f[static_cast<std::size_t>(iq) * n + ij].real() -
                 at(iq, ij)) /
                dtau;
            num += (lhs - rhs) * (lhs - rhs);
            den += rhs * rhs;
        }
    }
    CHECK(std::sqrt(num / den) < 0.02);
}

TEST_CASE("classical limit agrees with the trajectory ensemble") {
    // gamma -> 0 turns the transport equation into the classical Liouville
    // equation, whose moments are trajectory-ensemble averages.
    const PhaseSpaceGrid g = small_grid(128, 8.0);
    const double beta = 1e-3;
    const auto dp = dimless(beta, 1e-4, 0.05);
    const ChirpProfile c = flat_window(1e-4, -400, 1e6);
    const double tau0 = -300.0, tau1 = -100.0;
    const double var = 0.25;

    WignerSolver solver(dp, c, 1e-4, 0.004,
                        displaced_gaussian(g, 2.0, 0.0, var, tau0));
    solver.evolve_to(tau1, tau1 - tau0);
    const auto d = solver.diagnostics();

    const std::size_t n_mc = 20000;
    std::vector<double> q(n_mc), j(n_mc), eps(n_mc, dp.epsilon);
    const double sigma = std::sqrt(var);
    for (std::size_t k = 0; k < n_mc; ++k) {
        const GaussianPair gp = gaussian_pair(777, k);
        q[k] = 2.0 + sigma * gp.z0;
        j[k] = sigma * gp.z1;
    }
    integrate_batch(q, j, eps, tau0, tau1, 0.004, beta, dp.alpha_tilde);
    double mq = 0, mj = 0;
    for (std::size_t k = 0; k < n_mc; ++k) {
        mq += q[k];
        mj += j[k];
    }
    mq /= static_cast<double>(n_mc);
    mj /= static_cast<double>(n_mc);

    CHECK(d.mean_q == doctest::Approx(mq).epsilon(0.02));
    CHECK(d.mean_j - mj == doctest::Approx(0.0).epsilon(0.03));
    CHECK(std::abs(d.norm - 1.0) < 1e-9);
    CHECK(d.l2 ==
          doctest::Approx(1.0 / (4.0 * constants::pi * var)).epsilon(1e-6));
}

TEST_CASE("step-size bound is enforced") {
    const PhaseSpaceGrid g = small_grid(64, 8.0);
    const auto dp = dimless(0.02, 1e-6, 0.0);
    const ChirpProfile c = flat_window(1e-6, -10, 10);
    const double bound = WignerSolver::max_stable_dtau(g, dp, 2.0);
    CHECK(bound > 0.0);
    CHECK_THROWS_AS(WignerSolver(dp, c, 2.0, 1.5 * bound, ground_state(g, 2.0)),
                    invalid_parameter);
}

TEST_CASE("locked fraction integrates mass outside the half-action disc") {
    const auto dp = dimless(25.0 * 3.55e-6, 1e-6, 0.0);
    const ChirpProfile c = flat_window(1e-6, -100, 5000);
    const PhaseSpaceGrid g = PhaseSpaceGrid::for_capture(256, dp.alpha_tilde,
                                                         dp.beta, 4215.0);
    // vacuum: everything near the origin
    WignerState vac = ground_state(g, 2.0, 4215.0);
    CHECK(locked_fraction(vac, dp, c) < 1e-6);

    // blob sitting on the locked orbit
    const double a_lock = adiabatic_locked_amplitude(dp.alpha_tilde, dp.beta, 4215.0);
    WignerState locked = displaced_gaussian(g, a_lock, 0.0, 1.0, 4215.0);
    CHECK(locked_fraction(locked, dp, c) > 0.999);

    // populations not separated early in the sweep
    WignerState early = ground_state(g, 2.0, 0.5);
    CHECK_THROWS_AS(locked_fraction(early, dp, c), numerical_error);
}

TEST_CASE("negativity metrics") {
    const PhaseSpaceGrid g = small_grid(64, 8.0);
    WignerState vac = ground_state(g, 2.0);
    const Negativity n0 = negativity(vac);
    CHECK(n0.min_f >= -1e-12);
    CHECK(n0.negative_mass <= 1e-12);

    vac.f[100] = -0.25;
    const Negativity n1 = negativity(vac);
    CHECK(n1.min_f == doctest::Approx(-0.25));
    CHECK(n1.negative_mass == doctest::Approx(0.25 * g.cell_area()));
}

TEST_CASE("snapshot round trip is lossless") {
    const PhaseSpaceGrid g = small_grid(64, 8.0);
    const WignerState s = ground_state(g, 2.0, 1.25);
    const auto dp = dimless(3.55e-6, 1e-6, 0.0123);
    const std::string p1 = "/tmp/chirpsim_test_snap1.bin";
    const std::string p2 = "/tmp/chirpsim_test_snap2.bin";
    export_snapshot(s, dp, p1);
    const Snapshot snap = import_snapshot(p1);
    CHECK(snap.state.tau == 1.25);
    CHECK(snap.beta == 3.55e-6);
    CHECK(snap.epsilon == 0.0123);
    CHECK(snap.state.grid.n_q == 64);
    export_snapshot(snap.state, dp, p2);

    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::vector<char> b1((std::istreambuf_iterator<char>(f1)),
                         std::istreambuf_iterator<char>());
    std::vector<char> b2((std::istreambuf_iterator<char>(f2)),
                         std::istreambuf_iterator<char>());
    CHECK(b1 == b2);

    // re-imported mass is still unity
    double mass = 0;
    for (const auto& z : snap.state.f) mass += z.real();
    CHECK(mass * g.cell_area() == doctest::Approx(1.0).epsilon(1e-8));

    CHECK_THROWS_AS(import_snapshot("/tmp/chirpsim_no_such_file.bin"), io_error);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}
