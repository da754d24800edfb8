#pragma once

#include "chirpsim/kernels/kernels.hpp"

namespace chirpsim::kernels {

#ifdef CHIRPSIM_HAVE_AVX2_TU
// Defined in kernels_avx2.cpp; only call after the CPU check passed.
const Backend* avx2_backend_impl();
#endif

} // namespace chirpsim::kernels
