#pragma once

#include <complex>
#include <cstddef>

namespace chirpsim::kernels {

/// One RK4 step of the chirped Duffing system for a batch of lanes.
///
///   dq/dtau = j
///   dj/dtau = -q + beta*q^3 - eps*cos(phi_d) - damping*j
///
/// All lanes share the drive phase; the three stage cosines per step come
/// from `cos_half`, sampled on the half-step grid tau0 + m*dt/2 for
/// m = 0 .. 2*steps.  `eps` is per-lane so independent bisections can run
/// in one batch.
struct DuffingBatch {
    double* q = nullptr;
    double* j = nullptr;
    const double* eps = nullptr;
    std::size_t lanes = 0;
    double beta = 0.0;
    double damping = 0.0;
    double dt = 0.0;
    const double* cos_half = nullptr; ///< 2*steps + 1 values
    std::size_t steps = 0;
};

using DuffingChunkFn = void (*)(const DuffingBatch&);

/// a[i] *= b[i]
using CMulFn = void (*)(std::complex<double>* a, const std::complex<double>* b,
                        std::size_t n);

/// a[i] *= b[i] * c[i]
using CMul2Fn = void (*)(std::complex<double>* a, const std::complex<double>* b,
                         const std::complex<double>* c, std::size_t n);

struct Backend {
    const char* name = "";
    DuffingChunkFn duffing_rk4_chunk = nullptr;
    CMulFn cmul_inplace = nullptr;
    CMul2Fn cmul2_inplace = nullptr;
};

/// Portable reference implementation.
const Backend& scalar_backend();

/// AVX2 implementation, or nullptr when unavailable (non-x86 build or CPU
/// without AVX2).  Bit-identical to the scalar backend by construction:
/// same per-lane operation order, no fused multiply-add.
const Backend* avx2_backend();

/// Backend selected at startup: AVX2 when the CPU supports it, else scalar.
/// The environment variable CHIRPSIM_KERNELS=scalar|avx2 overrides.
const Backend& active_backend();

} // namespace chirpsim::kernels
