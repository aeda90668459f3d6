#include "dshock/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dshock/errors.hpp"

namespace dshock {

Grid1D Grid1D::symmetric(double L, std::size_t n) {
    if (!(L > 0.0) || n < 3) throw UsageError("Grid1D: need L > 0 and n >= 3");
    Grid1D g{-L, 2.0 * L / static_cast<double>(n - 1), n};
    g.validate();
    return g;
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x(i);
    return out;
}

void Grid1D::validate() const {
    if (!(dx > 0.0) || !std::isfinite(x0)) throw UsageError("Grid1D: dx must be positive");
    if (n < 3) throw UsageError("Grid1D: n must be >= 3");
    if (n % 2 == 0) throw UsageError("Grid1D: n must be odd");
}

namespace num {

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
    double err = 0.0;
    double l1 = 0.0;
    // GK terminates on a relative test; convert tol into the mixed test
    // err <= tol * max(1, L1) using a single-panel estimate of L1.
    GK::integrate(f, a, b, 0, tol, &err, &l1);
    const double rel = (l1 > 0.0 && l1 < 1.0) ? tol / l1 : tol;
    double val = GK::integrate(f, a, b, 30, rel, &err, &l1);
    if (!std::isfinite(val) || err > 10.0 * tol * std::max(1.0, l1))
        throw NumericError("quadrature did not converge on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "], error estimate " + std::to_string(err));
    return val;
}

std::size_t bracket(std::span<const double> xs, double xq) {
    const std::size_t n = xs.size();
    auto it = std::upper_bound(xs.begin(), xs.end(), xq);
    std::size_t i = (it == xs.begin()) ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    return std::min(i, n - 2);
}

double interp_cubic(std::span<const double> xs, std::span<const double> ys, double xq) {
    const std::size_t n = xs.size();
    if (n < 4) throw UsageError("interp_cubic: need at least 4 nodes");
    xq = std::clamp(xq, xs.front(), xs.back());
    std::size_t i = bracket(xs, xq);
    std::size_t s = (i == 0) ? 0 : std::min(i - 1, n - 4);
    double out = 0.0;
    for (std::size_t j = s; j < s + 4; ++j) {
        double l = 1.0;
        for (std::size_t m = s; m < s + 4; ++m)
            if (m != j) l *= (xq - xs[m]) / (xs[j] - xs[m]);
        out += l * ys[j];
    }
    return out;
}

void solve_tridiagonal(std::span<const double> sub, std::span<const double> diag,
                       std::span<const double> sup, std::span<double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    double beta = diag[0];
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        c[i] = sup[i - 1] / beta;
        beta = diag[i] - sub[i] * c[i];
        rhs[i] = (rhs[i] - sub[i] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i + 1] * rhs[i + 1];
}

std::vector<double> diff_uniform(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 5) throw UsageError("diff_uniform: need at least 5 samples");
    std::vector<double> d(n);
    const double s = 1.0 / (12.0 * h);
    for (std::size_t i = 2; i + 2 < n; ++i) d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * s;
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s;
    const std::size_t a = n - 1, b = n - 2;
    d[a] = (25.0 * f[a] - 48.0 * f[a - 1] + 36.0 * f[a - 2] - 16.0 * f[a - 3] + 3.0 * f[a - 4]) * s;
    d[b] = (3.0 * f[a] + 10.0 * f[a - 1] - 18.0 * f[a - 2] + 6.0 * f[a - 3] - f[a - 4]) * s;
    return d;
}

std::vector<double> diff_nonuniform(std::span<const double> x, std::span<const double> f) {
    const std::size_t n = x.size();
    if (n < 5) throw UsageError("diff_nonuniform: need at least 5 samples");
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t s = (i < 2) ? 0 : std::min(i - 2, n - 5);
        double acc = 0.0;
        for (std::size_t j = s; j < s + 5; ++j) {
            double wj;
            if (j == i) {
                wj = 0.0;
                for (std::size_t m = s; m < s + 5; ++m)
                    if (m != i) wj += 1.0 / (x[i] - x[m]);
            } else {
                double num = 1.0, den = 1.0;
                for (std::size_t m = s; m < s + 5; ++m) {
                    if (m == j) continue;
                    den *= x[j] - x[m];
                    if (m != i) num *= x[i] - x[m];
                }
                wj = num / den;
            }
            acc += wj * f[j];
        }
        d[i] = acc;
    }
    return d;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw InsufficientData("fit_line: need at least 2 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw InsufficientData("fit_line: degenerate abscissae");
    LineFit r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (r.intercept + r.slope * x[i]);
        sse += e * e;
    }
    r.r2 = (syy > 0.0) ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    return r;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = b;
    return v;
}

std::vector<double> symmetric_logspace(double lo, double hi, std::size_t n_half) {
    std::vector<double> pos(n_half);
    const double la = std::log(lo), lb = std::log(hi);
    for (std::size_t i = 0; i < n_half; ++i)
        pos[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n_half - 1));
    std::vector<double> out;
    out.reserve(2 * n_half + 1);
    for (std::size_t i = n_half; i-- > 0;) out.push_back(-pos[i]);
    out.push_back(0.0);
    for (double p : pos) out.push_back(p);
    return out;
}

}  // namespace num
}  // namespace dshock
