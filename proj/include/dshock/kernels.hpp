#pragma once

#include <cstddef>
#include <span>

// Hot loops with a scalar reference and an AVX2 variant, chosen at runtime.
// Both variants return bitwise-identical results.

namespace dshock::kernels {

enum class Backend { scalar, avx2 };

const char* name(Backend b);
bool avx2_available();
// AVX2 when the CPU supports it, unless DSHOCK_KERNELS=scalar is set.
Backend active();

// y += a * k
void axpy(std::span<double> y, double a, std::span<const double> k, Backend b = active());

struct PairMax {
    double value = 0.0;  // max |u_j - u_i| / (x_j - x_i)^beta over i < j
    std::size_t i = 0, j = 0;
};

// Exact maximum of the Holder difference quotient over all pairs of the
// strictly increasing samples x. j ranges over [i+1, min(n, i+1+window)) when
// window > 0, all pairs otherwise.
PairMax holder_pairs(std::span<const double> x, std::span<const double> u, double beta, std::size_t window = 0,
                     Backend b = active());

namespace scalar {
void axpy(std::span<double> y, double a, std::span<const double> k);
PairMax holder_pairs(std::span<const double> x, std::span<const double> u, double beta, std::size_t window);
}  // namespace scalar

namespace avx2 {
void axpy(std::span<double> y, double a, std::span<const double> k);
PairMax holder_pairs(std::span<const double> x, std::span<const double> u, double beta, std::size_t window);
}  // namespace avx2

}  // namespace dshock::kernels
