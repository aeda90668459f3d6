#include <cmath>
#include <limits>

#include "dshock/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace dshock::kernels::avx2 {

namespace {

// log(v) for positive normal v, absolute error below 1e-10.
inline __m256d log_approx(__m256d v) {
    const __m256i bits = _mm256_castpd_si256(v);
    const __m256i magic = _mm256_set1_epi64x(0x4330000000000000LL);
    __m256d e = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(_mm256_srli_epi64(bits, 52), magic)),
                              _mm256_set1_pd(4503599627370496.0 + 1023.0));
    const __m256i mant = _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
                                         _mm256_set1_epi64x(0x3ff0000000000000LL));
    __m256d m = _mm256_castsi256_pd(mant);
    const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
    e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d z = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
    const __m256d z2 = _mm256_mul_pd(z, z);
    __m256d p = _mm256_set1_pd(2.0 / 11.0);
    p = _mm256_add_pd(_mm256_mul_pd(p, z2), _mm256_set1_pd(2.0 / 9.0));
    p = _mm256_add_pd(_mm256_mul_pd(p, z2), _mm256_set1_pd(2.0 / 7.0));
    p = _mm256_add_pd(_mm256_mul_pd(p, z2), _mm256_set1_pd(2.0 / 5.0));
    p = _mm256_add_pd(_mm256_mul_pd(p, z2), _mm256_set1_pd(2.0 / 3.0));
    p = _mm256_add_pd(_mm256_mul_pd(p, z2), _mm256_set1_pd(2.0));
    return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(0.6931471805599453)), _mm256_mul_pd(p, z));
}

// Candidates within this log distance of the running maximum are rechecked
// exactly; it dominates the approximation error of log_approx.
constexpr double kSlack = 1e-7;

}  // namespace

void axpy(std::span<double> y, double a, std::span<const double> k) {
    const std::size_t n = y.size();
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y.data() + i);
        __m256d vk = _mm256_loadu_pd(k.data() + i);
        _mm256_storeu_pd(y.data() + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vk)));
    }
    for (; i < n; ++i) y[i] = y[i] + a * k[i];
}

PairMax holder_pairs(std::span<const double> x, std::span<const double> u, double beta, std::size_t window) {
    const std::size_t n = x.size();
    PairMax best{-1.0, 0, 0};
    double thr = -std::numeric_limits<double>::infinity();
    const __m256d vbeta = _mm256_set1_pd(beta);
    const __m256d tiny = _mm256_set1_pd(1e-300);
    const __m256d absmask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    auto exact = [&](std::size_t i, std::size_t j) {
        const double v = std::abs(u[j] - u[i]) / std::pow(x[j] - x[i], beta);
        if (v > best.value) {
            best = {v, i, j};
            thr = std::log(v) - kSlack;
        }
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t jend = window ? std::min(n, i + 1 + window) : n;
        const __m256d xi = _mm256_set1_pd(x[i]);
        const __m256d ui = _mm256_set1_pd(u[i]);
        std::size_t j = i + 1;
        for (; j + 4 <= jend; j += 4) {
            const __m256d du = _mm256_max_pd(_mm256_and_pd(_mm256_sub_pd(_mm256_loadu_pd(u.data() + j), ui), absmask), tiny);
            const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x.data() + j), xi);
            const __m256d q = _mm256_sub_pd(log_approx(du), _mm256_mul_pd(vbeta, log_approx(dx)));
            const int mask = _mm256_movemask_pd(_mm256_cmp_pd(q, _mm256_set1_pd(thr), _CMP_GE_OQ));
            if (mask) {
                for (int l = 0; l < 4; ++l)
                    if (mask & (1 << l)) exact(i, j + static_cast<std::size_t>(l));
            }
        }
        for (; j < jend; ++j) exact(i, j);
    }
    if (best.value < 0.0) best.value = 0.0;
    return best;
}

}  // namespace dshock::kernels::avx2

#else

namespace dshock::kernels::avx2 {
void axpy(std::span<double> y, double a, std::span<const double> k) { scalar::axpy(y, a, k); }
PairMax holder_pairs(std::span<const double> x, std::span<const double> u, double beta, std::size_t window) {
    return scalar::holder_pairs(x, u, beta, window);
}
}  // namespace dshock::kernels::avx2

#endif
