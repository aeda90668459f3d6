#include <cstdlib>
#include <cstring>

#include "dshock/kernels.hpp"

namespace dshock::kernels {

const char* name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#if defined(DSHOCK_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend active() {
    static const Backend chosen = [] {
        const char* env = std::getenv("DSHOCK_KERNELS");
        if (env && std::strcmp(env, "scalar") == 0) return Backend::scalar;
        return avx2_available() ? Backend::avx2 : Backend::scalar;
    }();
    return chosen;
}

void axpy(std::span<double> y, double a, std::span<const double> k, Backend b) {
    if (b == Backend::avx2 && avx2_available())
        avx2::axpy(y, a, k);
    else
        scalar::axpy(y, a, k);
}

PairMax holder_pairs(std::span<const double> x, std::span<const double> u, double beta, std::size_t window,
                     Backend b) {
    if (b == Backend::avx2 && avx2_available()) return avx2::holder_pairs(x, u, beta, window);
    return scalar::holder_pairs(x, u, beta, window);
}

}  // namespace dshock::kernels
