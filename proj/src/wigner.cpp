#include "chirpsim/wigner.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>

#include "chirpsim/constants.hpp"
#include "chirpsim/dynamics.hpp"
#include "chirpsim/errors.hpp"
#include "chirpsim/kernels/kernels.hpp"

namespace chirpsim {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

double signed_mode(int m, int n) {
    return static_cast<double>(m < n / 2 ? m : m - n);
}

/// Largest |q - beta q^3| over [-q_half, q_half].
double max_restoring_force(double beta, double q_half) {
    double best = std::abs(q_half - beta * q_half * q_half * q_half);
    const double q_star = 1.0 / std::sqrt(3.0 * beta);
    if (q_star < q_half) {
        best = std::max(best, std::abs(q_star - beta * q_star * q_star * q_star));
    }
    return best;
}

} // namespace

double PhaseSpaceGrid::kq_at(int m) const {
    return constants::pi * signed_mode(m, n_q) / q_half;
}

double PhaseSpaceGrid::kj_at(int m) const {
    return constants::pi * signed_mode(m, n_j) / j_half;
}

void PhaseSpaceGrid::validate(double alpha_tilde, double beta, double tau_max) const {
    if (!is_pow2(n_q) || !is_pow2(n_j) || n_q < 64 || n_j < 64) {
        throw invalid_parameter("grid sizes must be powers of two, >= 64");
    }
    if (!(q_half > 0.0 && j_half > 0.0)) {
        throw invalid_parameter("grid half-widths must be positive");
    }
    const double needed = 1.6 * adiabatic_locked_amplitude(alpha_tilde, beta, tau_max);
    if (q_half < needed || j_half < needed) {
        throw invalid_parameter(
            "box too small for the locked orbit: need half-width >= " +
            std::to_string(needed));
    }
}

PhaseSpaceGrid PhaseSpaceGrid::for_capture(int n, double alpha_tilde, double beta,
                                           double tau_max) {
    PhaseSpaceGrid g;
    g.n_q = n;
    g.n_j = n;
    const double half = 1.6 * adiabatic_locked_amplitude(alpha_tilde, beta, tau_max);
    g.q_half = half;
    g.j_half = half;
    g.validate(alpha_tilde, beta, tau_max);
    return g;
}

WignerState ground_state(const PhaseSpaceGrid& grid, double gamma_init, double tau0) {
    if (!(gamma_init > 0.0 && gamma_init <= 2.0)) {
        throw invalid_parameter("gamma_init must be in (0, 2]");
    }
    WignerState s;
    s.grid = grid;
    s.tau = tau0;
    s.gamma = gamma_init;
    s.f.resize(static_cast<std::size_t>(grid.n_q) * grid.n_j);
    const double norm = 1.0 / (constants::pi * gamma_init);
    double mass = 0.0;
    for (int iq = 0; iq < grid.n_q; ++iq) {
        const double q = grid.q_at(iq);
        for (int ij = 0; ij < grid.n_j; ++ij) {
            const double j = grid.j_at(ij);
            const double v = norm * std::exp(-(q * q + j * j) / gamma_init);
            s.f[static_cast<std::size_t>(iq) * grid.n_j + ij] = v;
            mass += v;
        }
    }
    mass *= grid.cell_area();
    if (std::abs(mass - 1.0) > 1e-8) {
        throw config_error("phase-space box too small for the ground state: "
                           "grid mass deviates from 1 by " +
                           std::to_string(mass - 1.0));
    }
    return s;
}

WignerDiagnostics diagnose(const WignerState& state, const DimensionlessParams& dp,
                           const ChirpProfile& c) {
    const auto& g = state.grid;
    WignerDiagnostics d;
    d.tau = state.tau;
    const double area = g.cell_area();
    double sum = 0, sum2 = 0, neg = 0, sq = 0, sj = 0, sqq = 0, sjj = 0;
    double min_f = 0, max_im = 0, boundary = 0;
    for (int iq = 0; iq < g.n_q; ++iq) {
        const double q = g.q_at(iq);
        const bool edge_q = iq < 3 || iq >= g.n_q - 3;
        for (int ij = 0; ij < g.n_j; ++ij) {
            const auto z = state.f[static_cast<std::size_t>(iq) * g.n_j + ij];
            const double v = z.real();
            const double j = g.j_at(ij);
            sum += v;
            sum2 += z.real() * z.real() + z.imag() * z.imag();
            if (v < min_f) min_f = v;
            if (v < 0.0) neg -= v;
            sq += q * v;
            sj += j * v;
            sqq += q * q * v;
            sjj += j * j * v;
            max_im = std::max(max_im, std::abs(z.imag()));
            if (edge_q || ij < 3 || ij >= g.n_j - 3) boundary += std::abs(v);
        }
    }
    d.norm = sum * area;
    d.l2 = sum2 * area;
    d.min_f = min_f;
    d.negative_mass = neg * area;
    d.mean_q = sq / sum;
    d.mean_j = sj / sum;
    d.var_q = sqq / sum - d.mean_q * d.mean_q;
    d.var_j = sjj / sum - d.mean_j * d.mean_j;
    d.max_imag = max_im;
    d.boundary_mass = boundary * area;
    try {
        d.locked_fraction = locked_fraction(state, dp, c);
    } catch (const numerical_error&) {
        d.locked_fraction.reset();
    }
    return d;
}

double locked_fraction(const WignerState& state, const DimensionlessParams& dp,
                       const ChirpProfile& c) {
    (void)c;
    const auto& g = state.grid;
    const double a_lock =
        adiabatic_locked_amplitude(dp.alpha_tilde, dp.beta, state.tau);
    const double r_cut = 0.5 * a_lock;
    const double cell = std::max(g.dq(), g.dj());
    if (a_lock - r_cut <= 3.0 * cell) {
        throw numerical_error(
            "locked/unlocked populations not separated at tau = " +
            std::to_string(state.tau));
    }
    const double r2 = r_cut * r_cut;
    double outside = 0.0, total = 0.0;
    for (int iq = 0; iq < g.n_q; ++iq) {
        const double q = g.q_at(iq);
        for (int ij = 0; ij < g.n_j; ++ij) {
            const double j = g.j_at(ij);
            const double v = state.f[static_cast<std::size_t>(iq) * g.n_j + ij].real();
            total += v;
            if (q * q + j * j > r2) outside += v;
        }
    }
    return outside / total;
}

Negativity negativity(const WignerState& state) {
    Negativity n;
    double neg = 0.0;
    for (const auto& z : state.f) {
        const double v = z.real();
        if (v < n.min_f) n.min_f = v;
        if (v < 0.0) neg -= v;
    }
    n.negative_mass = neg * state.grid.cell_area();
    return n;
}

namespace {
constexpr char kSnapshotMagic[8] = {'W', 'G', 'S', 'N', 'A', 'P', '0', '1'};
}

void export_snapshot(const WignerState& state, const DimensionlessParams& dp,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open snapshot for writing", path);
    out.write(kSnapshotMagic, sizeof(kSnapshotMagic));
    const std::uint32_t nq = static_cast<std::uint32_t>(state.grid.n_q);
    const std::uint32_t nj = static_cast<std::uint32_t>(state.grid.n_j);
    out.write(reinterpret_cast<const char*>(&nq), 4);
    out.write(reinterpret_cast<const char*>(&nj), 4);
    const double header[7] = {state.grid.q_half, state.grid.j_half, state.tau,
                              state.gamma,       dp.beta,           dp.epsilon,
                              dp.alpha_tilde};
    out.write(reinterpret_cast<const char*>(header), sizeof(header));
    std::vector<double> row(static_cast<std::size_t>(nj));
    for (std::uint32_t iq = 0; iq < nq; ++iq) {
        for (std::uint32_t ij = 0; ij < nj; ++ij) {
            row[ij] = state.f[static_cast<std::size_t>(iq) * nj + ij].real();
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(sizeof(double) * nj));
    }
    if (!out) throw io_error("snapshot write failed", path);
}

Snapshot import_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open snapshot", path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kSnapshotMagic, 8) != 0) {
        throw io_error("not a snapshot file", path);
    }
    std::uint32_t nq = 0, nj = 0;
    in.read(reinterpret_cast<char*>(&nq), 4);
    in.read(reinterpret_cast<char*>(&nj), 4);
    double header[7];
    in.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!in || nq == 0 || nj == 0 || nq > (1u << 16) || nj > (1u << 16)) {
        throw io_error("corrupt snapshot header", path);
    }
    Snapshot snap;
    snap.state.grid.n_q = static_cast<int>(nq);
    snap.state.grid.n_j = static_cast<int>(nj);
    snap.state.grid.q_half = header[0];
    snap.state.grid.j_half = header[1];
    snap.state.tau = header[2];
    snap.state.gamma = header[3];
    snap.beta = header[4];
    snap.epsilon = header[5];
    snap.alpha_tilde = header[6];
    snap.state.f.resize(static_cast<std::size_t>(nq) * nj);
    std::vector<double> row(nj);
    for (std::uint32_t iq = 0; iq < nq; ++iq) {
        in.read(reinterpret_cast<char*>(row.data()),
                static_cast<std::streamsize>(sizeof(double) * nj));
        for (std::uint32_t ij = 0; ij < nj; ++ij) {
            snap.state.f[static_cast<std::size_t>(iq) * nj + ij] = row[ij];
        }
    }
    if (!in) throw io_error("snapshot truncated", path);
    return snap;
}

void export_csv(const WignerState& state, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw io_error("cannot open CSV for writing", path);
    out << "q,j,f\n";
    char line[96];
    for (int iq = 0; iq < state.grid.n_q; ++iq) {
        for (int ij = 0; ij < state.grid.n_j; ++ij) {
            std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g\n",
                          state.grid.q_at(iq), state.grid.j_at(ij),
                          state.real_at(iq, ij));
            out << line;
        }
    }
    if (!out) throw io_error("CSV write failed", path);
}

struct WignerSolver::Plans {
    fftw_plan j_fwd = nullptr;
    fftw_plan j_bwd = nullptr;
    fftw_plan q_fwd = nullptr;
    fftw_plan q_bwd = nullptr;

    ~Plans() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (j_fwd) fftw_destroy_plan(j_fwd);
        if (j_bwd) fftw_destroy_plan(j_bwd);
        if (q_fwd) fftw_destroy_plan(q_fwd);
        if (q_bwd) fftw_destroy_plan(q_bwd);
    }
};

double WignerSolver::max_stable_dtau(const PhaseSpaceGrid& grid,
                                     const DimensionlessParams& dp, double gamma) {
    const double kj_max = constants::pi / grid.dj();
    const double f_max = max_restoring_force(dp.beta, grid.q_half) + dp.epsilon;
    const double force_bound = 0.5 * constants::pi / (f_max * kj_max);
    const double quantum_coef = gamma * gamma * dp.beta * grid.q_half / 4.0;
    const double quantum_bound =
        0.5 * constants::pi / (quantum_coef * kj_max * kj_max * kj_max);
    return std::min(force_bound, quantum_bound);
}

WignerSolver::WignerSolver(const DimensionlessParams& dp, const ChirpProfile& c,
                           double gamma, double dtau, WignerState initial)
    : dp_(dp), chirp_(c), gamma_(gamma), dtau_(dtau), state_(std::move(initial)) {
    dp_.validate();
    if (!(gamma_ > 0.0 && gamma_ <= 2.0)) {
        throw invalid_parameter("gamma must be in (0, 2]");
    }
    const double bound = max_stable_dtau(state_.grid, dp_, gamma_);
    if (!(dtau_ > 0.0) || dtau_ > bound) {
        throw invalid_parameter("step size " + std::to_string(dtau_) +
                                " violates the spectral phase bound " +
                                std::to_string(bound));
    }
    state_.gamma = gamma_;

    build_multipliers(dtau_, adv_half_, adv_full_, force_static_);
    drive_.resize(static_cast<std::size_t>(state_.grid.n_j));

    plans_ = std::make_unique<Plans>();
    auto* data = reinterpret_cast<fftw_complex*>(state_.f.data());
    const int nq = state_.grid.n_q;
    const int nj = state_.grid.n_j;
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->j_fwd = fftw_plan_many_dft(1, &nj, nq, data, nullptr, 1, nj, data,
                                       nullptr, 1, nj, FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->j_bwd = fftw_plan_many_dft(1, &nj, nq, data, nullptr, 1, nj, data,
                                       nullptr, 1, nj, FFTW_BACKWARD, FFTW_ESTIMATE);
    plans_->q_fwd = fftw_plan_many_dft(1, &nq, nj, data, nullptr, nj, 1, data,
                                       nullptr, nj, 1, FFTW_FORWARD, FFTW_ESTIMATE);
    plans_->q_bwd = fftw_plan_many_dft(1, &nq, nj, data, nullptr, nj, 1, data,
                                       nullptr, nj, 1, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!plans_->j_fwd || !plans_->j_bwd || !plans_->q_fwd || !plans_->q_bwd) {
        throw numerical_error("FFTW plan creation failed");
    }
}

WignerSolver::~WignerSolver() = default;

void WignerSolver::build_multipliers(double dt,
                                     std::vector<std::complex<double>>& adv_half,
                                     std::vector<std::complex<double>>& adv_full,
                                     std::vector<std::complex<double>>& stat) const {
    const auto& g = state_.grid;
    const std::size_t n = static_cast<std::size_t>(g.n_q) * g.n_j;
    adv_half.resize(n);
    adv_full.resize(n);
    stat.resize(n);

    // Free streaming: mode (kq, j) picks up exp(-i kq j dt); the inverse
    // transform's 1/n_q lives here too.
    const double qnorm = 1.0 / g.n_q;
    for (int m = 0; m < g.n_q; ++m) {
        const double kq = g.kq_at(m);
        for (int ij = 0; ij < g.n_j; ++ij) {
            const double theta = -kq * g.j_at(ij) * dt;
            adv_full[static_cast<std::size_t>(m) * g.n_j + ij] =
                std::polar(qnorm, theta);
            adv_half[static_cast<std::size_t>(m) * g.n_j + ij] =
                std::polar(qnorm, 0.5 * theta);
        }
    }

    // Force + quantum step: mode (q, kj) picks up
    // exp(i dt [ (q - beta q^3) kj - (gamma^2 beta q / 4) kj^3 ]); the
    // drive part eps*cos(phi_d)*kj is time-dependent and multiplied per step.
    const double jnorm = 1.0 / g.n_j;
    const double qc = gamma_ * gamma_ * dp_.beta / 4.0;
    for (int iq = 0; iq < g.n_q; ++iq) {
        const double q = g.q_at(iq);
        const double f_static = q - dp_.beta * q * q * q;
        for (int m = 0; m < g.n_j; ++m) {
            const double kj = g.kj_at(m);
            const double theta = dt * (f_static * kj - qc * q * kj * kj * kj);
            stat[static_cast<std::size_t>(iq) * g.n_j + m] =
                std::polar(jnorm, theta);
        }
    }
}

void WignerSolver::apply_advection(const std::vector<std::complex<double>>& mult) {
    fftw_execute(plans_->q_fwd);
    kernels::active_backend().cmul_inplace(state_.f.data(), mult.data(),
                                           state_.f.size());
    fftw_execute(plans_->q_bwd);
}

void WignerSolver::apply_force(double tau_mid, double dt,
                               const std::vector<std::complex<double>>& stat) {
    const auto& g = state_.grid;
    const double drive = dp_.epsilon * std::cos(chirp_.phase(tau_mid));
    for (int m = 0; m < g.n_j; ++m) {
        drive_[static_cast<std::size_t>(m)] = std::polar(1.0, dt * drive * g.kj_at(m));
    }
    fftw_execute(plans_->j_fwd);
    const auto& kern = kernels::active_backend();
    for (int iq = 0; iq < g.n_q; ++iq) {
        const std::size_t off = static_cast<std::size_t>(iq) * g.n_j;
        kern.cmul2_inplace(state_.f.data() + off, stat.data() + off, drive_.data(),
                           static_cast<std::size_t>(g.n_j));
    }
    fftw_execute(plans_->j_bwd);
}

void WignerSolver::run_segment(std::int64_t steps, double dt,
                               const std::vector<std::complex<double>>& adv_half,
                               const std::vector<std::complex<double>>& adv_full,
                               const std::vector<std::complex<double>>& stat) {
    if (steps <= 0) return;
    const double tau0 = state_.tau;
    apply_advection(adv_half);
    for (std::int64_t k = 0; k < steps; ++k) {
        apply_force(tau0 + (static_cast<double>(k) + 0.5) * dt, dt, stat);
        apply_advection(k + 1 < steps ? adv_full : adv_half);
    }
    state_.tau = tau0 + static_cast<double>(steps) * dt;
}

void WignerSolver::evolve_to(double tau_target, double observe_dtau,
                             const std::function<void(const WignerDiagnostics&)>& observer) {
    if (!(tau_target > state_.tau)) {
        throw invalid_parameter("tau_target must exceed the current tau");
    }
    const std::int64_t per_segment = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(observe_dtau / dtau_)));

    auto check = [&](const WignerDiagnostics& d) {
        if (std::abs(d.norm - 1.0) > 1e-4) {
            throw numerical_error("norm drifted to " + std::to_string(d.norm) +
                                      " at tau = " + std::to_string(d.tau),
                                  d.tau);
        }
        if (d.boundary_mass > 1e-4) {
            throw numerical_error(
                "phase-space mass reached the box boundary (" +
                    std::to_string(d.boundary_mass) + ") at tau = " +
                    std::to_string(d.tau),
                d.tau);
        }
        if (observer) observer(d);
    };

    while (state_.tau < tau_target - 1e-9) {
        const double span = tau_target - state_.tau;
        std::int64_t full = static_cast<std::int64_t>(
            std::floor(span / dtau_ * (1.0 + 1e-15)));
        if (full > 0) {
            const std::int64_t n = std::min(per_segment, full);
            run_segment(n, dtau_, adv_half_, adv_full_, force_static_);
        } else {
            // final partial step with its own multipliers
            std::vector<std::complex<double>> h, f, s;
            build_multipliers(span, h, f, s);
            run_segment(1, span, h, f, s);
            state_.tau = tau_target;
        }
        check(diagnostics());
    }
}

WignerDiagnostics WignerSolver::diagnostics() const {
    return diagnose(state_, dp_, chirp_);
}

} // namespace chirpsim
