#include "chirpsim/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "kernels_backends.hpp"

namespace chirpsim::kernels {

const Backend* avx2_backend() {
#ifdef CHIRPSIM_HAVE_AVX2_TU
    if (__builtin_cpu_supports("avx2")) return avx2_backend_impl();
#endif
    return nullptr;
}

const Backend& active_backend() {
    static const Backend& selected = []() -> const Backend& {
        const char* env = std::getenv("CHIRPSIM_KERNELS");
        if (env != nullptr && std::strcmp(env, "scalar") == 0) {
            return scalar_backend();
        }
        const Backend* avx2 = avx2_backend();
        if (env != nullptr && std::strcmp(env, "avx2") == 0 && avx2 == nullptr) {
            return scalar_backend(); // requested but unavailable; fall back
        }
        return avx2 != nullptr ? *avx2 : scalar_backend();
    }();
    return selected;
}

} // namespace chirpsim::kernels
