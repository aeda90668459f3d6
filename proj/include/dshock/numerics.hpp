#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace dshock {

// Uniform grid x_i = x0 + i*dx, i = 0..n-1. n odd so a center node exists.
struct Grid1D {
    double x0 = 0.0;
    double dx = 0.0;
    std::size_t n = 0;

    static Grid1D symmetric(double L, std::size_t n);
    double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
    double x_end() const { return x(n - 1); }
    std::vector<double> nodes() const;
    void validate() const;
};

namespace num {

// Adaptive Gauss-Kronrod on [a,b]; b may be +inf. Throws NumericError when
// the error estimate stays above tol.
double integrate(const std::function<double(double)>& f, double a, double b, double tol);

// Cubic Lagrange interpolation through the four nodes around xq. xs must be
// strictly increasing; xq is clamped into [xs.front(), xs.back()].
double interp_cubic(std::span<const double> xs, std::span<const double> ys, double xq);

// Index i with xs[i] <= xq < xs[i+1], clamped to [0, n-2].
std::size_t bracket(std::span<const double> xs, double xq);

// Thomas algorithm. sub[0] and sup[n-1] are ignored. Overwrites rhs with x.
void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<double> rhs);

// d/dx on a uniform grid: 4th-order central interior, 4th-order one-sided
// near the ends.
std::vector<double> diff_uniform(std::span<const double> f, double h);

// d/dx on a strictly increasing nonuniform grid using the 5-point Lagrange
// derivative (one-sided near the ends).
std::vector<double> diff_nonuniform(std::span<const double> x, std::span<const double> f);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

std::vector<double> linspace(double a, double b, std::size_t n);

// n points: 0, then log-spaced from lo to hi, mirrored to negative values.
std::vector<double> symmetric_logspace(double lo, double hi, std::size_t n_half);

}  // namespace num
}  // namespace dshock
