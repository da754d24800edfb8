#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <vector>

#include "chirpsim/kernels/kernels.hpp"
#include "chirpsim/rng.hpp"

using namespace chirpsim;
using kernels::Backend;
using kernels::DuffingBatch;

namespace {

double uniform(std::uint64_t seed, std::uint64_t k, double lo, double hi) {
    const auto r = philox::block(seed, k);
    return lo + (hi - lo) * uniform_from_bits(r[0], r[1]);
}

struct BatchData {
    std::vector<double> q, j, eps, cos_half;
};

BatchData random_batch(std::uint64_t seed, std::size_t lanes, std::size_t steps) {
    BatchData d;
    d.q.resize(lanes);
    d.j.resize(lanes);
    d.eps.resize(lanes);
    for (std::size_t l = 0; l < lanes; ++l) {
        d.q[l] = uniform(seed, 3 * l, -2.0, 2.0);
        d.j[l] = uniform(seed, 3 * l + 1, -2.0, 2.0);
        d.eps[l] = uniform(seed, 3 * l + 2, 0.0, 0.05);
    }
    d.cos_half.resize(2 * steps + 1);
    for (std::size_t m = 0; m < d.cos_half.size(); ++m) {
        d.cos_half[m] = std::cos(uniform(seed ^ 0xabcd, m, 0.0, 6.28));
    }
    return d;
}

void run_backend(const Backend& b, BatchData d, double beta, double damping,
                 double dt, std::size_t steps, std::vector<double>& q_out,
                 std::vector<double>& j_out) {
    DuffingBatch batch;
    batch.q = d.q.data();
    batch.j = d.j.data();
    batch.eps = d.eps.data();
    batch.lanes = d.q.size();
    batch.beta = beta;
    batch.damping = damping;
    batch.dt = dt;
    batch.cos_half = d.cos_half.data();
    batch.steps = steps;
    b.duffing_rk4_chunk(batch);
    q_out = d.q;
    j_out = d.j;
}

} // namespace

TEST_CASE("active backend resolves") {
    const Backend& b = kernels::active_backend();
    CHECK(b.duffing_rk4_chunk != nullptr);
    CHECK(b.cmul_inplace != nullptr);
    CHECK(b.cmul2_inplace != nullptr);
    MESSAGE("active kernel backend: ", b.name);
}

TEST_CASE("avx2 duffing kernel is bit-identical to the scalar reference") {
    const Backend* avx2 = kernels::avx2_backend();
    if (avx2 == nullptr) {
        MESSAGE("AVX2 unavailable on this host; scalar-only");
        return;
    }
    // odd lane counts exercise the scalar tail inside the AVX2 kernel
    for (std::size_t lanes : {1u, 3u, 4u, 7u, 64u, 65u}) {
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const std::size_t steps = 37;
            BatchData d = random_batch(seed, lanes, steps);
            std::vector<double> qs, js, qa, ja;
            run_backend(kernels::scalar_backend(), d, 3.55e-6, 0.0, 0.01, steps, qs, js);
            run_backend(*avx2, d, 3.55e-6, 0.0, 0.01, steps, qa, ja);
            CHECK(std::memcmp(qs.data(), qa.data(), lanes * sizeof(double)) == 0);
            CHECK(std::memcmp(js.data(), ja.data(), lanes * sizeof(double)) == 0);

            // damped variant
            run_backend(kernels::scalar_backend(), d, 1e-3, 0.02, 0.02, steps, qs, js);
            run_backend(*avx2, d, 1e-3, 0.02, 0.02, steps, qa, ja);
            CHECK(std::memcmp(qs.data(), qa.data(), lanes * sizeof(double)) == 0);
            CHECK(std::memcmp(js.data(), ja.data(), lanes * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("complex multiply kernels match std::complex arithmetic") {
    const std::size_t n = 257;
    std::vector<std::complex<double>> a(n), b(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = {uniform(11, 4 * i, -1, 1), uniform(11, 4 * i + 1, -1, 1)};
        b[i] = {uniform(11, 4 * i + 2, -1, 1), uniform(11, 4 * i + 3, -1, 1)};
        c[i] = std::polar(1.0, uniform(12, i, -3.14, 3.14));
    }
    auto a1 = a;
    kernels::scalar_backend().cmul_inplace(a1.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(a1[i] - a[i] * b[i]) < 1e-15);
    }
    auto a2 = a;
    kernels::scalar_backend().cmul2_inplace(a2.data(), b.data(), c.data(), n);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(a2[i] - a[i] * b[i] * c[i]) < 1e-15);
    }
}

TEST_CASE("avx2 complex kernels are bit-identical to scalar") {
    const Backend* avx2 = kernels::avx2_backend();
    if (avx2 == nullptr) return;
    for (std::size_t n : {1u, 2u, 5u, 256u, 1001u}) {
        std::vector<std::complex<double>> a(n), b(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = {uniform(21, 4 * i, -2, 2), uniform(21, 4 * i + 1, -2, 2)};
            b[i] = {uniform(21, 4 * i + 2, -2, 2), uniform(21, 4 * i + 3, -2, 2)};
            c[i] = {uniform(22, 2 * i, -2, 2), uniform(22, 2 * i + 1, -2, 2)};
        }
        auto s1 = a, v1 = a;
        kernels::scalar_backend().cmul_inplace(s1.data(), b.data(), n);
        avx2->cmul_inplace(v1.data(), b.data(), n);
        CHECK(std::memcmp(s1.data(), v1.data(), n * sizeof(s1[0])) == 0);

        auto s2 = a, v2 = a;
        kernels::scalar_backend().cmul2_inplace(s2.data(), b.data(), c.data(), n);
        avx2->cmul2_inplace(v2.data(), b.data(), c.data(), n);
        CHECK(std::memcmp(s2.data(), v2.data(), n * sizeof(s2[0])) == 0);
    }
}
