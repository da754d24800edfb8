// AVX2 variants of the inner-loop kernels.  Compiled with -mavx2 only (no
// -mfma): every lane must reproduce the scalar backend bit-for-bit, so the
// code uses plain mul/add/sub in the same order as kernels_lane.hpp.

#include "chirpsim/kernels/kernels.hpp"

#include <immintrin.h>

#include "kernels_backends.hpp"
#include "kernels_lane.hpp"

namespace chirpsim::kernels {

namespace {

inline __m256d force4(__m256d q, __m256d j, __m256d beta, __m256d one,
                      __m256d damping, __m256d drive) {
    const __m256d q2 = _mm256_mul_pd(q, q);
    const __m256d t = _mm256_sub_pd(_mm256_mul_pd(beta, q2), one);
    return _mm256_sub_pd(
        _mm256_sub_pd(_mm256_mul_pd(t, q), drive),
        _mm256_mul_pd(damping, j));
}

void duffing_rk4_chunk_avx2(const DuffingBatch& b) {
    const std::size_t vec_lanes = b.lanes & ~std::size_t{3};
    const __m256d vbeta = _mm256_set1_pd(b.beta);
    const __m256d vdamp = _mm256_set1_pd(b.damping);
    const __m256d vone = _mm256_set1_pd(1.0);
    const __m256d vdt = _mm256_set1_pd(b.dt);
    const __m256d vhalf = _mm256_set1_pd(0.5 * b.dt);
    const __m256d vsixth = _mm256_set1_pd(b.dt / 6.0);
    const __m256d vtwo = _mm256_set1_pd(2.0);

    for (std::size_t m = 0; m < b.steps; ++m) {
        const double c0 = b.cos_half[2 * m];
        const double c1 = b.cos_half[2 * m + 1];
        const double c2 = b.cos_half[2 * m + 2];
        const __m256d vc0 = _mm256_set1_pd(c0);
        const __m256d vc1 = _mm256_set1_pd(c1);
        const __m256d vc2 = _mm256_set1_pd(c2);

        for (std::size_t l = 0; l < vec_lanes; l += 4) {
            const __m256d ve = _mm256_loadu_pd(b.eps + l);
            const __m256d w0 = _mm256_mul_pd(ve, vc0);
            const __m256d w1 = _mm256_mul_pd(ve, vc1);
            const __m256d w2 = _mm256_mul_pd(ve, vc2);

            const __m256d q = _mm256_loadu_pd(b.q + l);
            const __m256d j = _mm256_loadu_pd(b.j + l);

            const __m256d k1q = j;
            const __m256d k1j = force4(q, j, vbeta, vone, vdamp, w0);
            const __m256d q2 = _mm256_add_pd(q, _mm256_mul_pd(vhalf, k1q));
            const __m256d j2 = _mm256_add_pd(j, _mm256_mul_pd(vhalf, k1j));
            const __m256d k2q = j2;
            const __m256d k2j = force4(q2, j2, vbeta, vone, vdamp, w1);
            const __m256d q3 = _mm256_add_pd(q, _mm256_mul_pd(vhalf, k2q));
            const __m256d j3 = _mm256_add_pd(j, _mm256_mul_pd(vhalf, k2j));
            const __m256d k3q = j3;
            const __m256d k3j = force4(q3, j3, vbeta, vone, vdamp, w1);
            const __m256d q4 = _mm256_add_pd(q, _mm256_mul_pd(vdt, k3q));
            const __m256d j4 = _mm256_add_pd(j, _mm256_mul_pd(vdt, k3j));
            const __m256d k4q = j4;
            const __m256d k4j = force4(q4, j4, vbeta, vone, vdamp, w2);

            const __m256d sum_q = _mm256_add_pd(
                _mm256_add_pd(_mm256_add_pd(k1q, _mm256_mul_pd(vtwo, k2q)),
                              _mm256_mul_pd(vtwo, k3q)),
                k4q);
            const __m256d sum_j = _mm256_add_pd(
                _mm256_add_pd(_mm256_add_pd(k1j, _mm256_mul_pd(vtwo, k2j)),
                              _mm256_mul_pd(vtwo, k3j)),
                k4j);

            _mm256_storeu_pd(b.q + l, _mm256_add_pd(q, _mm256_mul_pd(vsixth, sum_q)));
            _mm256_storeu_pd(b.j + l, _mm256_add_pd(j, _mm256_mul_pd(vsixth, sum_j)));
        }
        for (std::size_t l = vec_lanes; l < b.lanes; ++l) {
            const double e = b.eps[l];
            detail::duffing_rk4_lane(b.q[l], b.j[l], b.dt, b.beta, b.damping,
                                     e * c0, e * c1, e * c2);
        }
    }
}

// (ar*br - ai*bi, ai*br + ar*bi) for two packed complex doubles.
inline __m256d cmul4(__m256d va, __m256d vb) {
    const __m256d b_re = _mm256_movedup_pd(vb);
    const __m256d b_im = _mm256_unpackhi_pd(vb, vb);
    const __m256d a_sw = _mm256_shuffle_pd(va, va, 0x5);
    const __m256d t0 = _mm256_mul_pd(va, b_re);
    const __m256d t1 = _mm256_mul_pd(a_sw, b_im);
    return _mm256_addsub_pd(t0, t1);
}

void cmul_inplace_avx2(std::complex<double>* a, const std::complex<double>* b,
                       std::size_t n) {
    auto* pa = reinterpret_cast<double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    const std::size_t vec = n & ~std::size_t{1};
    for (std::size_t i = 0; i < vec; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        _mm256_storeu_pd(pa + 2 * i, cmul4(va, vb));
    }
    for (std::size_t i = vec; i < n; ++i) detail::cmul_lane(a[i], b[i]);
}

void cmul2_inplace_avx2(std::complex<double>* a, const std::complex<double>* b,
                        const std::complex<double>* c, std::size_t n) {
    auto* pa = reinterpret_cast<double*>(a);
    const auto* pb = reinterpret_cast<const double*>(b);
    const auto* pc = reinterpret_cast<const double*>(c);
    const std::size_t vec = n & ~std::size_t{1};
    for (std::size_t i = 0; i < vec; i += 2) {
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d vc = _mm256_loadu_pd(pc + 2 * i);
        const __m256d vbc = cmul4(vb, vc);
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        _mm256_storeu_pd(pa + 2 * i, cmul4(va, vbc));
    }
    for (std::size_t i = vec; i < n; ++i) detail::cmul2_lane(a[i], b[i], c[i]);
}

} // namespace

const Backend* avx2_backend_impl() {
    static const Backend backend{"avx2", duffing_rk4_chunk_avx2,
                                 cmul_inplace_avx2, cmul2_inplace_avx2};
    return &backend;
}

} // namespace chirpsim::kernels
