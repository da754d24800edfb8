#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chirpsim/chirp.hpp"
#include "chirpsim/units.hpp"

namespace chirpsim {

/// Periodic phase-space box, n_q x n_j cells (powers of two), spanning
/// [-q_half, q_half) x [-j_half, j_half).
struct PhaseSpaceGrid {
    int n_q = 0;
    int n_j = 0;
    double q_half = 0.0;
    double j_half = 0.0;

    [[nodiscard]] double dq() const { return 2.0 * q_half / n_q; }
    [[nodiscard]] double dj() const { return 2.0 * j_half / n_j; }
    [[nodiscard]] double cell_area() const { return dq() * dj(); }
    [[nodiscard]] double q_at(int i) const { return -q_half + i * dq(); }
    [[nodiscard]] double j_at(int i) const { return -j_half + i * dj(); }
    /// Signed wavenumber of mode m along q (standard DFT ordering).
    [[nodiscard]] double kq_at(int m) const;
    [[nodiscard]] double kj_at(int m) const;

    /// Power-of-two sizes >= 64; box must contain the predicted locked
    /// orbit with the 1.6x margin.
    void validate(double alpha_tilde, double beta, double tau_max) const;

    /// Box sized 1.6x the adiabatic locked amplitude at tau_max.
    static PhaseSpaceGrid for_capture(int n, double alpha_tilde, double beta,
                                      double tau_max);
};

/// Discretized quasi-probability distribution.  The field is stored complex
/// for exactly-unitary spectral steps; all observables use the real part and
/// max |Im f| is tracked as a solver-accuracy diagnostic.
struct WignerState {
    PhaseSpaceGrid grid;
    double tau = 0.0;
    double gamma = 0.0;
    std::vector<std::complex<double>> f; ///< row-major [iq][ij]

    [[nodiscard]] double real_at(int iq, int ij) const {
        return f[static_cast<std::size_t>(iq) * grid.n_j + ij].real();
    }
};

/// Vacuum (ground-state) Gaussian (1/(pi*gamma)) exp(-(q^2+j^2)/gamma).
/// Throws config_error if more than 1e-8 of its mass falls outside the box.
WignerState ground_state(const PhaseSpaceGrid& grid, double gamma_init,
                         double tau0 = 0.0);

struct WignerDiagnostics {
    double tau = 0.0;
    double norm = 0.0;          ///< integral of Re f
    double l2 = 0.0;            ///< integral of |f|^2
    double min_f = 0.0;         ///< min Re f
    double negative_mass = 0.0; ///< integral of |min(Re f, 0)|
    double mean_q = 0.0;
    double mean_j = 0.0;
    double var_q = 0.0;
    double var_j = 0.0;
    double max_imag = 0.0;      ///< max |Im f|
    double boundary_mass = 0.0; ///< |Re f| mass within 3 cells of the box edge
    std::optional<double> locked_fraction;
};

WignerDiagnostics diagnose(const WignerState& state, const DimensionlessParams& dp,
                           const ChirpProfile& c);

/// Mass outside the origin-centred disc of half the adiabatic locked
/// amplitude; consistent with the trajectory classifier.  Throws
/// numerical_error until the populations are separated by > 3 cells.
double locked_fraction(const WignerState& state, const DimensionlessParams& dp,
                       const ChirpProfile& c);

struct Negativity {
    double min_f = 0.0;
    double negative_mass = 0.0;
};

Negativity negativity(const WignerState& state);

/// Self-describing binary snapshot (grid, tau, gamma, model constants,
/// row-major real field).  Lossless: write -> read -> write is
/// byte-identical.
void export_snapshot(const WignerState& state, const DimensionlessParams& dp,
                     const std::string& path);

struct Snapshot {
    WignerState state;
    double beta = 0.0;
    double epsilon = 0.0;
    double alpha_tilde = 0.0;
};

Snapshot import_snapshot(const std::string& path);

/// Companion CSV emitter (header q,j,f).
void export_csv(const WignerState& state, const std::string& path);

/// Fourier split-step integrator for the phase-space transport equation
///
///   df/dtau + j df/dq - [(q - beta q^3) + eps cos phi_d] df/dj
///     = (gamma^2 beta q / 4) d^3f/dj^3
///
/// via Strang splitting: half-step free streaming in q, full force +
/// third-derivative step in j (exact unitary multipliers in the conjugate
/// Fourier variable, drive evaluated at the substep midpoint), half-step
/// streaming.  Norm and L2 are conserved to rounding by construction.
class WignerSolver {
public:
    WignerSolver(const DimensionlessParams& dp, const ChirpProfile& c,
                 double gamma, double dtau, WignerState initial);
    ~WignerSolver();

    WignerSolver(const WignerSolver&) = delete;
    WignerSolver& operator=(const WignerSolver&) = delete;

    /// Largest step satisfying the spectral phase bounds
    /// max|F| * kj_max * dtau < pi/2 and (gamma^2 beta q_half/4) * kj_max^3
    /// * dtau < pi/2.
    static double max_stable_dtau(const PhaseSpaceGrid& grid,
                                  const DimensionlessParams& dp, double gamma);

    /// Advances to tau_target, invoking the observer roughly every
    /// observe_dtau (always at the end).  Aborts with numerical_error if the
    /// norm drifts by more than 1e-4 or boundary mass exceeds 1e-4.
    void evolve_to(double tau_target, double observe_dtau,
                   const std::function<void(const WignerDiagnostics&)>& observer = {});

    [[nodiscard]] const WignerState& state() const { return state_; }
    [[nodiscard]] WignerDiagnostics diagnostics() const;
    [[nodiscard]] double dtau() const { return dtau_; }

private:
    struct Plans;

    void apply_advection(const std::vector<std::complex<double>>& mult);
    void apply_force(double tau_mid, double dt,
                     const std::vector<std::complex<double>>& stat);
    void run_segment(std::int64_t steps, double dt,
                     const std::vector<std::complex<double>>& adv_half,
                     const std::vector<std::complex<double>>& adv_full,
                     const std::vector<std::complex<double>>& stat);
    void build_multipliers(double dt, std::vector<std::complex<double>>& adv_half,
                           std::vector<std::complex<double>>& adv_full,
                           std::vector<std::complex<double>>& stat) const;

    DimensionlessParams dp_;
    ChirpProfile chirp_;
    double gamma_;
    double dtau_;
    WignerState state_;
    std::vector<std::complex<double>> adv_half_, adv_full_, force_static_;
    std::vector<std::complex<double>> drive_;
    std::unique_ptr<Plans> plans_;
};

} // namespace chirpsim
