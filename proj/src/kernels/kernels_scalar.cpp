#include "chirpsim/kernels/kernels.hpp"

#include "kernels_lane.hpp"

namespace chirpsim::kernels {

namespace {

void duffing_rk4_chunk_scalar(const DuffingBatch& b) {
    for (std::size_t m = 0; m < b.steps; ++m) {
        const double c0 = b.cos_half[2 * m];
        const double c1 = b.cos_half[2 * m + 1];
        const double c2 = b.cos_half[2 * m + 2];
        for (std::size_t l = 0; l < b.lanes; ++l) {
            const double e = b.eps[l];
            detail::duffing_rk4_lane(b.q[l], b.j[l], b.dt, b.beta, b.damping,
                                     e * c0, e * c1, e * c2);
        }
    }
}

void cmul_inplace_scalar(std::complex<double>* a, const std::complex<double>* b,
                         std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) detail::cmul_lane(a[i], b[i]);
}

void cmul2_inplace_scalar(std::complex<double>* a, const std::complex<double>* b,
                          const std::complex<double>* c, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) detail::cmul2_lane(a[i], b[i], c[i]);
}

} // namespace

const Backend& scalar_backend() {
    static const Backend backend{"scalar", duffing_rk4_chunk_scalar,
                                 cmul_inplace_scalar, cmul2_inplace_scalar};
    return backend;
}

} // namespace chirpsim::kernels
