#pragma once

// Per-lane reference arithmetic shared by the scalar backend and the tail
// loops of the vector backends.  Operation order here defines the
// bit-exactness contract; keep mul/add sequences in sync with the AVX2
// intrinsics in kernels_avx2.cpp.

#include <complex>
#include <cstddef>

namespace chirpsim::kernels::detail {

inline double duffing_force(double q, double j, double beta, double damping,
                            double drive) {
    // drive = eps * cos(phi_d), precombined per stage
    const double q2 = q * q;
    const double t = beta * q2 - 1.0;
    return t * q - drive - damping * j;
}

inline void duffing_rk4_lane(double& q, double& j, double dt, double beta,
                             double damping, double w0, double w1, double w2) {
    const double half = 0.5 * dt;
    const double k1q = j;
    const double k1j = duffing_force(q, j, beta, damping, w0);
    const double q2 = q + half * k1q;
    const double j2 = j + half * k1j;
    const double k2q = j2;
    const double k2j = duffing_force(q2, j2, beta, damping, w1);
    const double q3 = q + half * k2q;
    const double j3 = j + half * k2j;
    const double k3q = j3;
    const double k3j = duffing_force(q3, j3, beta, damping, w1);
    const double q4 = q + dt * k3q;
    const double j4 = j + dt * k3j;
    const double k4q = j4;
    const double k4j = duffing_force(q4, j4, beta, damping, w2);
    const double sixth = dt / 6.0;
    q = q + sixth * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
    j = j + sixth * (k1j + 2.0 * k2j + 2.0 * k3j + k4j);
}

inline void cmul_lane(std::complex<double>& a, const std::complex<double>& b) {
    const double ar = a.real(), ai = a.imag();
    const double br = b.real(), bi = b.imag();
    a = {ar * br - ai * bi, ai * br + ar * bi};
}

inline void cmul2_lane(std::complex<double>& a, const std::complex<double>& b,
                       const std::complex<double>& c) {
    const double br = b.real(), bi = b.imag();
    const double cr = c.real(), ci = c.imag();
    const std::complex<double> bc{br * cr - bi * ci, bi * cr + br * ci};
    cmul_lane(a, bc);
}

} // namespace chirpsim::kernels::detail
