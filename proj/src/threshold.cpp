#include "chirpsim/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chirpsim/constants.hpp"
#include "chirpsim/errors.hpp"
#include "chirpsim/parallel.hpp"
#include "chirpsim/rng.hpp"

namespace chirpsim {

namespace {

double classify_cut_action2(const DimensionlessParams& dp, const ChirpProfile& c) {
    return 4.0 * dp.alpha_tilde * c.tau_end / (3.0 * dp.beta);
}

/// Splits lanes across workers; every lane is independent, so the split
/// cannot change results.
void integrate_batch_parallel(std::vector<double>& q, std::vector<double>& j,
                              const std::vector<double>& eps, double tau0,
                              const ChirpProfile& c, double beta, double dtau,
                              double damping, unsigned workers,
                              std::vector<std::uint8_t>* failed) {
    const std::size_t lanes = q.size();
    parallel_for_blocks(lanes, workers, [&](std::size_t lo, std::size_t hi) {
        const std::size_t n = hi - lo;
        if (failed == nullptr) {
            integrate_batch({q.data() + lo, n}, {j.data() + lo, n},
                            {eps.data() + lo, n}, tau0, c.tau_end, dtau, beta,
                            c.alpha_tilde, damping);
            return;
        }
        try {
            integrate_batch({q.data() + lo, n}, {j.data() + lo, n},
                            {eps.data() + lo, n}, tau0, c.tau_end, dtau, beta,
                            c.alpha_tilde, damping);
        } catch (const numerical_error&) {
            // fall through: non-finite lanes are recorded below
        }
        for (std::size_t l = lo; l < hi; ++l) {
            if (!std::isfinite(q[l]) || !std::isfinite(j[l])) (*failed)[l] = 1;
        }
    });
}

} // namespace

OscState sample_initial(const InitialDistribution& dist, std::uint64_t k,
                        double tau0) {
    if (!(dist.variance_scale >= 0.0)) {
        throw invalid_parameter("variance_scale must be >= 0");
    }
    const double sigma = std::sqrt(dist.variance_scale);
    const GaussianPair g = gaussian_pair(dist.seed, k);
    return {sigma * g.z0, sigma * g.z1, tau0};
}

LockingProbability locking_probability(double epsilon, const DimensionlessParams& dp,
                                       const ChirpProfile& c,
                                       const InitialDistribution& dist,
                                       std::uint64_t n, const McOptions& opts) {
    if (n == 0) throw invalid_parameter("locking_probability requires n >= 1");
    if (epsilon < 0.0) throw invalid_parameter("epsilon must be >= 0");
    const double tau0 = opts.start_tau.value_or(c.tau_start);
    if (tau0 < c.tau_start || tau0 >= c.tau_end) {
        throw invalid_parameter("start tau must lie inside the chirp window");
    }

    std::vector<double> q(n), j(n), eps(n, epsilon);
    for (std::uint64_t k = 0; k < n; ++k) {
        const OscState s = sample_initial(dist, k, tau0);
        q[k] = s.q;
        j[k] = s.j;
    }
    std::vector<std::uint8_t> failed(n, 0);
    integrate_batch_parallel(q, j, eps, tau0, c, dp.beta, opts.dtau, opts.damping,
                             resolve_workers(opts.workers), &failed);

    const double cut = classify_cut_action2(dp, c);
    LockingProbability out;
    for (std::uint64_t k = 0; k < n; ++k) {
        if (failed[k]) {
            ++out.n_failed;
            continue;
        }
        ++out.n_total;
        if (q[k] * q[k] + j[k] * j[k] > cut) ++out.n_locked;
    }
    if (out.n_failed * 1000 > n) {
        throw numerical_error(std::to_string(out.n_failed) + " of " +
                              std::to_string(n) + " trajectories diverged");
    }
    if (out.n_total == 0) throw numerical_error("all trajectories diverged");
    out.p_hat = static_cast<double>(out.n_locked) / static_cast<double>(out.n_total);
    out.ci = wilson_ci(out.n_locked, out.n_total);
    return out;
}

ThresholdCurve threshold_scan(std::span<const double> eps_grid,
                              const DimensionlessParams& dp, const ChirpProfile& c,
                              const InitialDistribution& dist,
                              std::uint64_t n_per_point, const McOptions& opts) {
    if (eps_grid.size() < 6) throw invalid_parameter("eps grid needs >= 6 points");
    for (std::size_t i = 1; i < eps_grid.size(); ++i) {
        if (!(eps_grid[i] > eps_grid[i - 1])) {
            throw invalid_parameter("eps grid must be strictly increasing");
        }
    }
    ThresholdCurve curve;
    curve.points.reserve(eps_grid.size());
    for (const double e : eps_grid) {
        const LockingProbability lp =
            locking_probability(e, dp, c, dist, n_per_point, opts);
        curve.points.push_back(
            {e, lp.n_locked, lp.n_total, lp.p_hat, lp.ci.lo, lp.ci.hi});
    }
    return curve;
}

ErfFitResult fit_threshold(const ThresholdCurve& curve) {
    std::vector<double> eps, p, w;
    for (const auto& pt : curve.points) {
        if (pt.n_total < 50) continue;
        const double sigma = (pt.ci_hi - pt.ci_lo) / (2.0 * 1.959963984540054);
        eps.push_back(pt.epsilon);
        p.push_back(pt.p_hat);
        w.push_back(1.0 / (sigma * sigma));
    }
    if (eps.size() < 3) {
        throw invalid_parameter("insufficient coverage: fewer than 3 points with n >= 50");
    }
    const double pmin = *std::min_element(p.begin(), p.end());
    const double pmax = *std::max_element(p.begin(), p.end());
    if (!(pmin < 0.2 && pmax > 0.8)) {
        throw invalid_parameter(
            "insufficient coverage: scan must span p < 0.2 and p > 0.8 (got " +
            std::to_string(pmin) + " .. " + std::to_string(pmax) + ")");
    }
    return fit_erf_profile(eps, p, w);
}

namespace {

struct BisectContext {
    const DimensionlessParams& dp;
    const ChirpProfile& c;
    double dtau;
    double damping;
    unsigned workers;
};

/// Classifies one trajectory per cell at the given per-cell drive.
std::vector<LockClass> classify_cells(const BisectContext& ctx,
                                      const std::vector<OscState>& inits,
                                      const std::vector<double>& eps) {
    const std::size_t n = inits.size();
    std::vector<double> q(n), j(n);
    for (std::size_t i = 0; i < n; ++i) {
        q[i] = inits[i].q;
        j[i] = inits[i].j;
    }
    const double tau0 = inits.empty() ? ctx.c.tau_start : inits[0].tau;
    integrate_batch_parallel(q, j, eps, tau0, ctx.c, ctx.dp.beta, ctx.dtau,
                             ctx.damping, ctx.workers, nullptr);
    const double cut = classify_cut_action2(ctx.dp, ctx.c);
    std::vector<LockClass> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = (q[i] * q[i] + j[i] * j[i] > cut) ? LockClass::Locked
                                                   : LockClass::Unlocked;
    }
    return out;
}

/// Lockstep bisection of per-cell thresholds inside verified brackets.
std::vector<double> bisect_cells(const BisectContext& ctx,
                                 const std::vector<OscState>& inits,
                                 std::vector<double> lo, std::vector<double> hi,
                                 double rel_tol) {
    const std::size_t n = inits.size();
    std::vector<std::size_t> active(n);
    for (std::size_t i = 0; i < n; ++i) active[i] = i;
    while (!active.empty()) {
        std::vector<OscState> sub_init;
        std::vector<double> mid;
        sub_init.reserve(active.size());
        mid.reserve(active.size());
        for (const std::size_t i : active) {
            sub_init.push_back(inits[i]);
            mid.push_back(0.5 * (lo[i] + hi[i]));
        }
        const auto cls = classify_cells(ctx, sub_init, mid);
        std::vector<std::size_t> next;
        for (std::size_t a = 0; a < active.size(); ++a) {
            const std::size_t i = active[a];
            if (cls[a] == LockClass::Locked) {
                hi[i] = mid[a];
            } else {
                lo[i] = mid[a];
            }
            if (hi[i] - lo[i] > rel_tol * hi[i]) next.push_back(i);
        }
        active.swap(next);
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (lo[i] + hi[i]);
    return out;
}

} // namespace

double bisect_threshold(const DimensionlessParams& dp, const ChirpProfile& c,
                        const OscState& initial, double rel_tol,
                        const McOptions& opts) {
    dp.validate();
    BisectContext ctx{dp, c, opts.dtau, opts.damping, resolve_workers(opts.workers)};
    const double guess = calibration::threshold_prefactor *
                         std::pow(dp.alpha_tilde, 0.75) / std::sqrt(dp.beta);

    double lo = guess / 3.0;
    double hi = guess * 3.0;
    std::vector<OscState> one{initial};
    int tries = 0;
    while (classify_cells(ctx, one, {lo})[0] == LockClass::Locked) {
        lo *= 0.5;
        if (++tries > 10) throw numerical_error("bisect_threshold: no unlocked bracket");
    }
    tries = 0;
    while (classify_cells(ctx, one, {hi})[0] == LockClass::Unlocked) {
        hi *= 2.0;
        if (++tries > 10) throw numerical_error("bisect_threshold: no locked bracket");
    }
    return bisect_cells(ctx, one, {lo}, {hi}, rel_tol)[0];
}

double predicted_width_volts(const PhysicalParams& p, double kappa) {
    p.validate();
    const double t_eff = effective_temperature(p.bath_temperature, p.resonance_omega);
    return 2.0 * kappa *
           std::sqrt(2.0 * constants::pi * p.inductance * p.chirp_rate *
                     constants::k_boltzmann * t_eff);
}

double predicted_width_eps(double alpha_tilde, double sigma, double kappa) {
    if (!(alpha_tilde > 0.0)) throw invalid_parameter("alpha_tilde must be > 0");
    return 2.0 * kappa * std::sqrt(2.0 * constants::pi * alpha_tilde) * sigma;
}

KappaResult kappa_estimate(const DimensionlessParams& dp, const ChirpProfile& c,
                           std::span<const double> a0_grid,
                           std::span<const double> dphi_grid, double rel_tol,
                           const McOptions& opts) {
    if (a0_grid.empty() || dphi_grid.empty()) {
        throw invalid_parameter("kappa_estimate needs non-empty grids");
    }
    BisectContext ctx{dp, c, opts.dtau, opts.damping, resolve_workers(opts.workers)};

    KappaResult result;
    result.eps_c0 = bisect_threshold(dp, c, {0.0, 0.0, c.tau_start}, rel_tol, opts);

    // Initial conditions at tau_start: the mismatch dphi is measured against
    // the drive phase there.
    const double phi0 = c.phase(c.tau_start);
    std::vector<OscState> inits;
    std::vector<double> a0s, dphis;
    for (const double a0 : a0_grid) {
        for (const double dphi : dphi_grid) {
            inits.push_back({a0 * std::cos(phi0 + dphi), -a0 * std::sin(phi0 + dphi),
                             c.tau_start});
            a0s.push_back(a0);
            dphis.push_back(dphi);
        }
    }
    const std::size_t n = inits.size();

    std::vector<double> lo(n, 0.5 * result.eps_c0);
    std::vector<double> hi(n, 1.6 * result.eps_c0);
    const auto lo_cls = classify_cells(ctx, inits, lo);
    const auto hi_cls = classify_cells(ctx, inits, hi);
    for (std::size_t i = 0; i < n; ++i) {
        if (lo_cls[i] == LockClass::Locked || hi_cls[i] == LockClass::Unlocked) {
            throw numerical_error(
                "kappa_estimate: bracket violated at cell A0 = " +
                std::to_string(a0s[i]) + ", dphi = " + std::to_string(dphis[i]));
        }
    }
    const auto thresholds = bisect_cells(ctx, inits, lo, hi, rel_tol);

    // Linear model in both quadratures of the start phase,
    // eps = a - p*A0*cos(dphi) - q*A0*sin(dphi); the free rotation between
    // tau_start and capture mixes the quadratures by a constant angle.
    double s_cc = 0, s_cs = 0, s_ss = 0, s_c = 0, s_s = 0, s_1 = 0;
    double b_c = 0, b_s = 0, b_1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xc = a0s[i] * std::cos(dphis[i]);
        const double xs = a0s[i] * std::sin(dphis[i]);
        s_cc += xc * xc;
        s_cs += xc * xs;
        s_ss += xs * xs;
        s_c += xc;
        s_s += xs;
        s_1 += 1.0;
        b_c += xc * thresholds[i];
        b_s += xs * thresholds[i];
        b_1 += thresholds[i];
    }
    // Solve the 3x3 normal equations for (a, p, q) by elimination.
    double m[3][4] = {{s_1, s_c, s_s, b_1},
                      {s_c, s_cc, s_cs, b_c},
                      {s_s, s_cs, s_ss, b_s}};
    for (int col = 0; col < 3; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
        }
        std::swap(m[col], m[pivot]);
        if (std::abs(m[col][col]) < 1e-30) {
            throw numerical_error("kappa_estimate: degenerate (A0, dphi) grid");
        }
        for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int cc = col; cc < 4; ++cc) m[r][cc] -= f * m[col][cc];
        }
    }
    const double a = m[0][3] / m[0][0];
    const double p = -m[1][3] / m[1][1];
    const double q = -m[2][3] / m[2][2];

    result.kappa_raw = std::hypot(p, q);
    result.phase_offset = std::atan2(q, p);
    result.fit_intercept = a;
    const double sqrt_alpha = std::sqrt(dp.alpha_tilde);
    result.kappa_shift_norm = result.kappa_raw / sqrt_alpha;
    result.kappa_width_norm = result.kappa_raw / (2.0 * sqrt_alpha);

    result.cells.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        result.cells[i] = {a0s[i], dphis[i], thresholds[i]};
        const double model = a - p * a0s[i] * std::cos(dphis[i]) -
                             q * a0s[i] * std::sin(dphis[i]);
        result.max_residual = std::max(result.max_residual,
                                       std::abs(thresholds[i] - model));
    }
    return result;
}

AlphaScalingResult alpha_scaling(std::span<const double> alphas, double beta,
                                 std::optional<double> quality,
                                 const McOptions& opts) {
    if (alphas.size() < 4) throw invalid_parameter("alpha_scaling needs >= 4 rates");
    const double amin = *std::min_element(alphas.begin(), alphas.end());
    const double amax = *std::max_element(alphas.begin(), alphas.end());
    if (!(amax / amin >= 10.0)) {
        throw invalid_parameter("alpha_scaling rates must span at least a decade");
    }

    AlphaScalingResult result;
    result.alpha_tilde.assign(alphas.begin(), alphas.end());
    result.eps_c.resize(alphas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        DimensionlessParams dp;
        dp.beta = beta;
        dp.alpha_tilde = alphas[i];
        dp.gamma = 2.0;
        const ChirpProfile c = ChirpProfile::auto_window(alphas[i], quality);
        result.eps_c[i] = bisect_threshold(dp, c, {0.0, 0.0, c.tau_start}, 1e-4, opts);
    }

    std::vector<double> lx(alphas.size()), ly(alphas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        lx[i] = std::log(result.alpha_tilde[i]);
        ly[i] = std::log(result.eps_c[i]);
    }
    const LineFit line = fit_line(lx, ly);
    result.exponent = line.slope;
    result.se_exponent = line.se_slope;
    return result;
}

TempSweepResult temperature_sweep(std::span<const double> temperatures,
                                  const PhysicalParams& p,
                                  std::span<const double> injected_noise,
                                  const TempSweepOptions& opts) {
    if (temperatures.empty()) throw invalid_parameter("temperature list is empty");
    p.validate();

    TempSweepResult result;

    // One reference bisection; thresholds at other temperatures follow the
    // exact beta^(-1/2) scaling of the deterministic capture threshold.
    PhysicalParams pref = p;
    pref.bath_temperature = temperatures[0];
    const DimensionlessParams dp_ref = reduce(pref, 0.0);
    const ChirpProfile chirp =
        ChirpProfile::auto_window(dp_ref.alpha_tilde, p.quality);
    const double eps_c_ref =
        bisect_threshold(dp_ref, chirp, {0.0, 0.0, chirp.tau_start}, 1e-4, opts.mc);

    std::vector<double> noise{injected_noise.begin(), injected_noise.end()};
    if (noise.empty()) noise.push_back(0.0);

    const double grid_kappa =
        opts.scale_kappa > 0.0 ? opts.scale_kappa : calibration::kappa;
    std::uint64_t stream = 0;
    for (const double temperature : temperatures) {
        PhysicalParams pt = p;
        pt.bath_temperature = temperature;
        const DimensionlessParams dp = reduce(pt, 0.0);
        const double eps_c = eps_c_ref * std::sqrt(dp_ref.beta / dp.beta);
        const double vscale = voltage_scale(pt);

        for (const double t_noise : noise) {
            TempSweepRow row;
            row.temperature = temperature;
            row.injected_noise = t_noise;
            row.t_eff = dp.t_eff;
            row.sigma2 = 1.0 + t_noise / dp.t_eff;
            row.eps_c = eps_c;

            const double sigma = std::sqrt(row.sigma2);
            const double wpred =
                predicted_width_eps(dp.alpha_tilde, sigma, grid_kappa);
            const double half = opts.grid_half_widths * wpred;
            std::vector<double> grid(static_cast<std::size_t>(opts.grid_points));
            for (int i = 0; i < opts.grid_points; ++i) {
                grid[static_cast<std::size_t>(i)] =
                    eps_c - half +
                    2.0 * half * static_cast<double>(i) /
                        static_cast<double>(opts.grid_points - 1);
            }
            if (grid.front() <= 0.0) {
                throw numerical_error("temperature_sweep: scan grid hit epsilon <= 0");
            }

            InitialDistribution dist;
            dist.variance_scale = row.sigma2;
            dist.seed = opts.seed + (stream++);
            ThresholdCurve curve =
                threshold_scan(grid, dp, chirp, dist, opts.n_per_point, opts.mc);
            curve.fit = fit_threshold(curve);

            row.width_eps = curve.fit->width;
            row.width_volts = row.width_eps * vscale;
            result.rows.push_back(row);
        }
    }

    // Scale factor for the kelvin-units column.  Self-calibration measures
    // kappa from the most classical row of this sweep, so the scaled column
    // tests only the temperature dependence.
    double kappa = opts.scale_kappa;
    if (kappa <= 0.0) {
        const TempSweepRow* anchor = &result.rows.front();
        for (const auto& row : result.rows) {
            if (row.t_eff + row.injected_noise >
                anchor->t_eff + anchor->injected_noise) {
                anchor = &row;
            }
        }
        kappa = anchor->width_eps /
                (2.0 * std::sqrt(2.0 * constants::pi * dp_ref.alpha_tilde *
                                 anchor->sigma2));
        result.scale_self_calibrated = true;
    }
    result.scale_kappa = kappa;
    const double denom = 8.0 * constants::pi * kappa * kappa * p.inductance *
                         p.chirp_rate * constants::k_boltzmann;
    for (auto& row : result.rows) {
        row.scaled_width2_kelvin = row.width_volts * row.width_volts / denom;
    }
    return result;
}

double probability_from_average(double v_bar, double v_low, double v_high) {
    if (!(v_high > v_low)) throw invalid_parameter("requires v_high > v_low");
    const double p = (v_bar - v_low) / (v_high - v_low);
    return std::clamp(p, 0.0, 1.0);
}

} // namespace chirpsim
