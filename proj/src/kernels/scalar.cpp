#include <cmath>

#include "dshock/kernels.hpp"

namespace dshock::kernels::scalar {

void axpy(std::span<double> y, double a, std::span<const double> k) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * k[i];
}

PairMax holder_pairs(std::span<const double> x, std::span<const double> u, double beta, std::size_t window) {
    const std::size_t n = x.size();
    PairMax best{-1.0, 0, 0};
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t jend = window ? std::min(n, i + 1 + window) : n;
        for (std::size_t j = i + 1; j < jend; ++j) {
            const double v = std::abs(u[j] - u[i]) / std::pow(x[j] - x[i], beta);
            if (v > best.value) best = {v, i, j};
        }
    }
    if (best.value < 0.0) best.value = 0.0;
    return best;
}

}  // namespace dshock::kernels::scalar
