#include "dshock/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/tools/minima.hpp>

#include "dshock/errors.hpp"
#include "dshock/kernels.hpp"
#include "dshock/numerics.hpp"

namespace dshock {

namespace {

constexpr std::size_t kBruteForceMax = 10000;
constexpr std::size_t kCoarseTarget = 2000;
constexpr std::size_t kRefineRows = 100;

HolderResult two_stage(std::span<const double> x, std::span<const double> u, double beta) {
    const std::size_t n = x.size();
    const std::size_t k = std::max<std::size_t>(1, (n + kCoarseTarget - 1) / kCoarseTarget);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; i += k) idx.push_back(i);
    if (idx.back() != n - 1) idx.push_back(n - 1);

    struct Row {
        double q;
        std::size_t i, j;
    };
    std::vector<Row> rows;
    for (std::size_t a = 0; a + 1 < idx.size(); ++a) {
        Row r{-1.0, idx[a], idx[a + 1]};
        for (std::size_t b = a + 1; b < idx.size(); ++b) {
            const double q = std::abs(u[idx[b]] - u[idx[a]]) / std::pow(x[idx[b]] - x[idx[a]], beta);
            if (q > r.q) r = {q, idx[a], idx[b]};
        }
        rows.push_back(r);
    }
    const std::size_t top = std::min(kRefineRows, rows.size());
    std::partial_sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(top), rows.end(),
                      [](const Row& a, const Row& b) { return a.q > b.q; });

    // Short-range pairs over the full grid, then full neighborhoods of the
    // best coarse pairs.
    kernels::PairMax best = kernels::holder_pairs(x, u, beta, 2 * k + 1);
    for (std::size_t r = 0; r < top; ++r) {
        const std::size_t i0 = rows[r].i >= k ? rows[r].i - k : 0, i1 = std::min(n - 1, rows[r].i + k);
        const std::size_t j0 = rows[r].j >= k ? rows[r].j - k : 0, j1 = std::min(n - 1, rows[r].j + k);
        for (std::size_t i = i0; i <= i1; ++i)
            for (std::size_t j = std::max(j0, i + 1); j <= j1; ++j) {
                const double q = std::abs(u[j] - u[i]) / std::pow(x[j] - x[i], beta);
                if (q > best.value) best = {q, i, j};
            }
    }
    return {best.value, x[best.i], x[best.j], best.i, best.j, HolderMethod::two_stage};
}

// Indices of the fit window: drop the last `exclude_last` records, keep the
// final `decades` of d = T* - t.
std::vector<std::size_t> final_window(std::span<const double> d, const FitWindowOptions& opt) {
    const std::size_t n = d.size();
    if (n <= opt.exclude_last) throw InsufficientData("fit window: too few records");
    const std::size_t last = n - 1 - opt.exclude_last;
    const double d_end = d[last];
    const double lim = d_end * std::pow(10.0, opt.decades);
    std::vector<std::size_t> w;
    for (std::size_t i = 0; i <= last; ++i)
        if (d[i] <= lim * (1.0 + 1e-12)) w.push_back(i);
    if (w.size() < opt.min_points)
        throw InsufficientData("fit window: " + std::to_string(w.size()) + " records in the final decade, need " +
                               std::to_string(opt.min_points));
    return w;
}

}  // namespace

HolderResult holder_seminorm(std::span<const double> x, std::span<const double> u, double beta, HolderMethod method) {
    if (!(beta > 0.0 && beta <= 1.0)) throw UsageError("holder_seminorm: beta must lie in (0, 1]");
    if (x.size() != u.size()) throw UsageError("holder_seminorm: size mismatch");
    if (x.size() < 3) throw UsageError("holder_seminorm: need at least 3 samples");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i + 1] > x[i])) throw UsageError("holder_seminorm: x must be strictly increasing");
    if (method == HolderMethod::automatic)
        method = x.size() <= kBruteForceMax ? HolderMethod::brute_force : HolderMethod::two_stage;
    if (method == HolderMethod::two_stage) return two_stage(x, u, beta);
    kernels::PairMax p = kernels::holder_pairs(x, u, beta);
    return {p.value, x[p.i], x[p.j], p.i, p.j, HolderMethod::brute_force};
}

bool holder_resolved(const HolderResult& h, std::size_t min_span) { return h.j - h.i >= min_span; }

const char* to_string(RateStatus s) { return s == RateStatus::fitted ? "fitted" : "bounded seminorm"; }

TemporalFit fit_temporal_rate(std::span<const double> t, std::span<const double> sem, double t_star, double beta,
                              const FitWindowOptions& opt) {
    if (t.size() != sem.size()) throw UsageError("fit_temporal_rate: size mismatch");
    if (!(beta > 0.0 && beta <= 1.0)) throw UsageError("fit_temporal_rate: beta must lie in (0, 1]");
    for (double ti : t)
        if (!(ti < t_star)) throw UsageError("fit_temporal_rate: t_star lies inside the data range");
    std::vector<double> d(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) d[i] = t_star - t[i];
    const auto w = final_window(d, opt);

    TemporalFit out;
    out.beta = beta;
    out.expected = -(3.0 * beta - 1.0) / 2.0;
    std::vector<double> lx, ly;
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i : w) {
        lx.push_back(std::log(d[i]));
        ly.push_back(std::log(sem[i]));
        lo = std::min(lo, sem[i]);
        hi = std::max(hi, sem[i]);
    }
    out.variation = hi / lo;
    num::LineFit f = num::fit_line(lx, ly);
    out.fit.exponent = f.slope;
    out.fit.prefactor = std::exp(f.intercept);
    out.fit.r2 = f.r2;
    out.fit.window_lo = d[w.back()];
    out.fit.window_hi = d[w.front()];
    out.fit.points = w.size();
    if (beta <= 1.0 / 3.0 + 1e-12) out.status = RateStatus::bounded;
    return out;
}

SpatialFit fit_spatial_profile(std::span<const double> x, std::span<const double> rho, double x_star,
                               const SpatialFitOptions& opt) {
    if (x.size() != rho.size()) throw UsageError("fit_spatial_profile: size mismatch");
    double peak = 0.0;
    for (double r : rho) peak = std::max(peak, r - 1.0);
    SpatialFit out;
    // Two-parameter form on the whole local region.
    std::vector<double> r23, lr;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = rho[i] - 1.0;
        if (e >= opt.rho_floor) {
            r23.push_back(std::cbrt((x[i] - x_star) * (x[i] - x_star)));
            lr.push_back(std::log(e));
        }
    }
    if (r23.size() < 3) throw InsufficientData("fit_spatial_profile: fewer than 3 samples above the density floor");
    auto logc_for = [&](double delta) {
        double s = 0.0;
        for (std::size_t k = 0; k < r23.size(); ++k) s += lr[k] + std::log(delta + r23[k]);
        return s / static_cast<double>(r23.size());
    };
    auto sse = [&](double log_delta) {
        const double delta = std::exp(log_delta);
        const double lc = logc_for(delta);
        double s = 0.0;
        for (std::size_t k = 0; k < r23.size(); ++k) {
            const double e = lr[k] - (lc - std::log(delta + r23[k]));
            s += e * e;
        }
        return s;
    };
    const double d0 = 1.0 / peak;
    auto m = boost::math::tools::brent_find_minima(sse, std::log(d0) - 12.0, std::log(d0) + 12.0, 40);
    out.delta = std::exp(m.first);
    out.c = std::exp(logc_for(out.delta));
    out.two_param_rms = std::sqrt(m.second / static_cast<double>(r23.size()));
    out.two_param_points = r23.size();

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = rho[i] - 1.0;
        const double r = std::abs(x[i] - x_star);
        if (e >= opt.rho_floor && e * opt.inner_factor <= peak && r > 0.0) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(e));
        }
    }
    if (lx.size() < opt.min_points)
        throw InsufficientData("fit_spatial_profile: " + std::to_string(lx.size()) +
                               " samples in the spatially dominated window, need " + std::to_string(opt.min_points));
    num::LineFit f = num::fit_line(lx, ly);
    out.slope.exponent = f.slope;
    out.slope.prefactor = std::exp(f.intercept);
    out.slope.r2 = f.r2;
    out.slope.window_lo = std::exp(*std::min_element(lx.begin(), lx.end()));
    out.slope.window_hi = std::exp(*std::max_element(lx.begin(), lx.end()));
    out.slope.points = lx.size();
    return out;
}

TstarEstimate estimate_tstar(std::span<const double> t, std::span<const double> max_ux, const FitWindowOptions& opt) {
    if (t.size() != max_ux.size()) throw UsageError("estimate_tstar: size mismatch");
    const std::size_t n = t.size();
    if (n < opt.min_points) throw InsufficientData("estimate_tstar: too few records");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = 1.0 / max_ux[i];
    TstarEstimate out;
    std::size_t start = n - 1;
    while (start > 0 && g[start - 1] > g[start]) --start;
    for (std::size_t i = 0; i < start; ++i)
        if (g[i + 1] > g[i]) out.non_monotone_tail = true;
    std::vector<double> ts, gs;
    const double lim = g[n - 1] * std::pow(10.0, opt.decades);
    for (std::size_t i = start; i < n; ++i)
        if (g[i] <= lim) {
            ts.push_back(t[i]);
            gs.push_back(g[i]);
        }
    if (ts.size() < opt.min_points)
        throw InsufficientData("estimate_tstar: " + std::to_string(ts.size()) + " monotone records in the final decade");
    num::LineFit f = num::fit_line(ts, gs);
    out.t_star = -f.intercept / f.slope;
    out.fit.exponent = f.slope;
    out.fit.prefactor = f.intercept;
    out.fit.r2 = f.r2;
    out.fit.window_lo = ts.front();
    out.fit.window_hi = ts.back();
    out.fit.points = ts.size();
    return out;
}

}  // namespace dshock
