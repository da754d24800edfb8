#include "chirpsim/dynamics.hpp"

#include <cmath>
#include <string>

#include "chirpsim/constants.hpp"
#include "chirpsim/errors.hpp"
#include "chirpsim/kernels/kernels.hpp"

namespace chirpsim {

namespace {

constexpr std::size_t kChunkSteps = 256;

struct StepPlan {
    std::int64_t full_steps = 0;
    double remainder = 0.0; ///< final short step, 0 if the span divides evenly
};

StepPlan plan_steps(double tau0, double tau_end, double dtau) {
    if (!(dtau > 0.0) || dtau > 0.05) {
        throw invalid_parameter("dtau must be in (0, 0.05]");
    }
    const double span = tau_end - tau0;
    if (!(span > 0.0)) throw invalid_parameter("tau_end must exceed initial tau");
    StepPlan plan;
    plan.full_steps = static_cast<std::int64_t>(std::floor(span / dtau * (1.0 + 1e-15)));
    double rem = span - static_cast<double>(plan.full_steps) * dtau;
    plan.remainder = (rem > 1e-12 * dtau) ? rem : 0.0;
    return plan;
}

/// cos(phi_d) on the half-step grid tau0 + (base + m)*h2 for m = 0..count-1.
void fill_cosines(const ChirpProfile& c, double tau0, double h2,
                  std::int64_t base, std::size_t count, double* out) {
    for (std::size_t m = 0; m < count; ++m) {
        const double tau = tau0 + static_cast<double>(base + static_cast<std::int64_t>(m)) * h2;
        out[m] = std::cos(c.phase(tau));
    }
}

void check_finite(std::span<const double> q, std::span<const double> j, double tau) {
    for (std::size_t l = 0; l < q.size(); ++l) {
        if (!std::isfinite(q[l]) || !std::isfinite(j[l])) {
            throw numerical_error(
                "trajectory lane " + std::to_string(l) +
                    " diverged to a non-finite state near tau = " + std::to_string(tau),
                tau);
        }
    }
}

} // namespace

std::pair<double, double> derivative(const OscState& s, const DimensionlessParams& dp,
                                     const ChirpProfile& c, double damping) {
    const double dq = s.j;
    const double dj = -s.q + dp.beta * s.q * s.q * s.q -
                      dp.epsilon * std::cos(c.phase(s.tau)) - damping * s.j;
    return {dq, dj};
}

double phase_mismatch(const OscState& s, const ChirpProfile& c) {
    if (s.q == 0.0 && s.j == 0.0) return 0.0;
    const double raw = std::atan2(-s.j, s.q) - c.phase(s.tau);
    double wrapped = std::remainder(raw, 2.0 * constants::pi);
    if (wrapped <= -constants::pi) wrapped = constants::pi;
    return wrapped;
}

double adiabatic_locked_amplitude(double alpha_tilde, double beta, double tau) {
    if (tau <= 0.0) return 0.0;
    return std::sqrt(8.0 * alpha_tilde * tau / (3.0 * beta));
}

LockClass classify(const OscState& final_state, const DimensionlessParams& dp,
                   const ChirpProfile& c) {
    if (std::abs(final_state.tau - c.tau_end) > 1e-9 * std::max(1.0, std::abs(c.tau_end))) {
        throw invalid_parameter("classify requires the state at tau_end");
    }
    const double action2 = final_state.q * final_state.q + final_state.j * final_state.j;
    const double cut = 4.0 * dp.alpha_tilde * c.tau_end / (3.0 * dp.beta);
    return action2 > cut ? LockClass::Locked : LockClass::Unlocked;
}

void integrate_batch(std::span<double> q, std::span<double> j,
                     std::span<const double> eps, double tau0, double tau_end,
                     double dtau, double beta, double alpha_tilde, double damping) {
    if (q.size() != j.size() || q.size() != eps.size()) {
        throw invalid_parameter("batch arrays must have equal length");
    }
    const StepPlan plan = plan_steps(tau0, tau_end, dtau);
    ChirpProfile c;
    c.alpha_tilde = alpha_tilde;
    c.tau_start = tau0;
    c.tau_end = tau_end;

    const auto& kern = kernels::active_backend();
    const double h2 = 0.5 * dtau;
    double cos_buf[2 * kChunkSteps + 1];

    kernels::DuffingBatch batch;
    batch.q = q.data();
    batch.j = j.data();
    batch.eps = eps.data();
    batch.lanes = q.size();
    batch.beta = beta;
    batch.damping = damping;
    batch.dt = dtau;
    batch.cos_half = cos_buf;

    std::int64_t step = 0;
    while (step < plan.full_steps) {
        const std::size_t n = static_cast<std::size_t>(
            std::min<std::int64_t>(kChunkSteps, plan.full_steps - step));
        fill_cosines(c, tau0, h2, 2 * step, 2 * n + 1, cos_buf);
        batch.steps = n;
        kern.duffing_rk4_chunk(batch);
        step += static_cast<std::int64_t>(n);
        check_finite(q, j, tau0 + static_cast<double>(step) * dtau);
    }

    if (plan.remainder > 0.0) {
        const double t0 = tau0 + static_cast<double>(plan.full_steps) * dtau;
        cos_buf[0] = std::cos(c.phase(t0));
        cos_buf[1] = std::cos(c.phase(t0 + 0.5 * plan.remainder));
        cos_buf[2] = std::cos(c.phase(t0 + plan.remainder));
        batch.dt = plan.remainder;
        batch.steps = 1;
        kern.duffing_rk4_chunk(batch);
        check_finite(q, j, tau_end);
    }
}

Outcome integrate(const OscState& initial, const DimensionlessParams& dp,
                  const ChirpProfile& c, double dtau, double damping,
                  std::int64_t sample_every) {
    if (initial.tau < c.tau_start || initial.tau >= c.tau_end) {
        throw invalid_parameter("initial tau must lie inside the chirp window");
    }
    const StepPlan plan = plan_steps(initial.tau, c.tau_end, dtau);

    double q = initial.q;
    double jj = initial.j;
    const double tau0 = initial.tau;

    Outcome out;
    auto record = [&](double tau) {
        out.history.push_back({tau, q, jj, phase_mismatch({q, jj, tau}, c)});
    };
    if (sample_every > 0) record(tau0);

    const auto& kern = kernels::active_backend();
    const double h2 = 0.5 * dtau;
    std::vector<double> cos_buf;
    kernels::DuffingBatch batch;
    batch.q = &q;
    batch.j = &jj;
    batch.eps = &dp.epsilon;
    batch.lanes = 1;
    batch.beta = dp.beta;
    batch.damping = damping;
    batch.dt = dtau;

    const std::int64_t stride =
        sample_every > 0 ? sample_every : static_cast<std::int64_t>(kChunkSteps);
    std::int64_t step = 0;
    while (step < plan.full_steps) {
        const std::int64_t n = std::min(stride, plan.full_steps - step);
        cos_buf.resize(2 * static_cast<std::size_t>(n) + 1);
        fill_cosines(c, tau0, h2, 2 * step, cos_buf.size(), cos_buf.data());
        batch.cos_half = cos_buf.data();
        batch.steps = static_cast<std::size_t>(n);
        kern.duffing_rk4_chunk(batch);
        step += n;
        const double tau = tau0 + static_cast<double>(step) * dtau;
        if (!std::isfinite(q) || !std::isfinite(jj)) {
            throw numerical_error("trajectory diverged to a non-finite state near tau = " +
                                      std::to_string(tau),
                                  tau);
        }
        if (sample_every > 0 && step % sample_every == 0) record(tau);
    }
    if (plan.remainder > 0.0) {
        const double t0 = tau0 + static_cast<double>(plan.full_steps) * dtau;
        double tail[3] = {std::cos(c.phase(t0)), std::cos(c.phase(t0 + 0.5 * plan.remainder)),
                          std::cos(c.phase(t0 + plan.remainder))};
        batch.cos_half = tail;
        batch.dt = plan.remainder;
        batch.steps = 1;
        kern.duffing_rk4_chunk(batch);
    }

    out.final_state = {q, jj, c.tau_end};
    if (!std::isfinite(q) || !std::isfinite(jj)) {
        throw numerical_error("trajectory diverged to a non-finite state near tau = " +
                                  std::to_string(c.tau_end),
                              c.tau_end);
    }
    out.final_amplitude = std::sqrt(q * q + jj * jj);
    out.classification = classify(out.final_state, dp, c);
    if (sample_every > 0 &&
        (out.history.empty() || out.history.back().tau != c.tau_end)) {
        record(c.tau_end);
    }
    return out;
}

} // namespace chirpsim
