#include "dshock/pressureless_euler.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "dshock/burgers_profile.hpp"
#include "dshock/errors.hpp"
#include "dshock/numerics.hpp"

namespace dshock {

PEInitialData pe_gauss() {
    PEInitialData d;
    d.name = "gauss";
    d.n0 = [](double) { return 1.0; };
    d.v0 = [](double x) { return -x * std::exp(-x * x); };
    d.dv0 = [](double x) { return (2.0 * x * x - 1.0) * std::exp(-x * x); };
    d.d2v0 = [](double x) { return (6.0 * x - 4.0 * x * x * x) * std::exp(-x * x); };
    d.d3v0 = [](double x) { return (6.0 - 24.0 * x * x + 8.0 * x * x * x * x) * std::exp(-x * x); };
    return d;
}

PEInitialData pe_sech() {
    InitialData f = figure1_data();
    PEInitialData d;
    d.name = "sech";
    d.n0 = [](double) { return 1.0; };
    d.v0 = f.u[0];
    d.dv0 = f.u[1];
    d.d2v0 = f.u[2];
    d.d3v0 = f.u[3];
    return d;
}

PEInitialData pe_profile() {
    PEInitialData d;
    d.name = "profile";
    d.n0 = [](double) { return 1.0; };
    d.v0 = [](double x) { return eval_profile(x); };
    d.dv0 = [](double x) { return eval_derivative(x, 1); };
    d.d2v0 = [](double x) { return eval_derivative(x, 2); };
    d.d3v0 = [](double x) { return eval_derivative(x, 3); };
    return d;
}

PEInitialData pe_preset(const std::string& name) {
    if (name == "gauss") return pe_gauss();
    if (name == "sech") return pe_sech();
    if (name == "profile") return pe_profile();
    throw UsageError("unknown pressureless preset '" + name + "' (expected gauss, sech or profile)");
}

InitialData to_initial_data(const PEInitialData& d) {
    InitialData out;
    out.t0 = d.t0;
    out.eps = 0.0;
    out.provenance = Provenance::custom;
    out.rho = {d.n0, [](double) { return 0.0; }, [](double) { return 0.0; }};
    out.u = {d.v0, d.dv0, d.d2v0, d.d3v0, [](double) { return 0.0; }};
    return out;
}

PEState exact_state(const PEInitialData& d, double t, std::span<const double> alphas) {
    PEState s;
    s.t = t;
    const double tau = t - d.t0;
    s.alpha.assign(alphas.begin(), alphas.end());
    for (double a : alphas) {
        const double w = 1.0 + tau * d.dv0(a);
        if (!(w > 0.0)) throw DomainError("exact_state: t is at or beyond the lifespan");
        s.x.push_back(a + tau * d.v0(a));
        s.v.push_back(d.v0(a));
        s.n.push_back(d.n0(a) / w);
        s.w.push_back(w);
    }
    return s;
}

Lifespan lifespan(const PEInitialData& d, double a, double b) {
    const std::size_t n = 200001;
    double best = INFINITY, at = 0.0;
    const double h = (b - a) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = a + h * static_cast<double>(i);
        const double v = d.dv0(x);
        if (v < best) {
            best = v;
            at = x;
        }
    }
    Lifespan L;
    auto r = boost::math::tools::brent_find_minima(d.dv0, std::max(a, at - h), std::min(b, at + h), 52);
    if (r.second < best) {
        best = r.second;
        at = r.first;
    }
    L.min_dv0 = best;
    L.alpha_star = at;
    if (!(best < 0.0)) return L;
    L.blows_up = true;
    L.elapsed = 1.0 / -best;
    L.t_star = d.t0 + L.elapsed;
    L.x_star = at + L.elapsed * d.v0(at);
    return L;
}

double invert_characteristic(const PEInitialData& d, double t, double x, double a_lo, double a_hi) {
    const double tau = t - d.t0;
    auto g = [&](double a) { return a + tau * d.v0(a) - x; };
    double lo = a_lo, hi = a_hi;
    while (g(lo) > 0.0) lo -= (hi - lo);
    while (g(hi) < 0.0) hi += (hi - lo);
    boost::math::tools::eps_tolerance<double> tol(53);
    std::uintmax_t it = 200;
    auto br = boost::math::tools::toms748_solve(g, lo, hi, tol, it);
    return 0.5 * (br.first + br.second);
}

SelfSimReport selfsim_check(const PEInitialData& d, std::span<const double> s_values, std::span<const double> ys) {
    if (d.t0 != -1.0 || std::abs(d.v0(0.0)) > 1e-14 || std::abs(d.dv0(0.0) + 1.0) > 1e-12 ||
        std::abs(d.d2v0(0.0)) > 1e-12)
        throw UsageError("selfsim_check: data must satisfy t0 = -1, v0(0) = 0, v0'(0) = -1, v0''(0) = 0");
    Lifespan L = lifespan(d);
    if (std::abs(L.min_dv0 + 1.0) > 1e-9) throw UsageError("selfsim_check: v0'(0) = -1 must be the global minimum");
    SelfSimReport rep;
    rep.N_lower = INFINITY;
    std::vector<double> first;
    for (double s : s_values) {
        const double t = -std::exp(-s);
        const double tau = t - d.t0;
        const double xs = std::exp(-1.5 * s);
        SelfSimSlice sl;
        sl.s = s;
        sl.N_weighted_min = INFINITY;
        std::vector<double> V;
        for (double y : ys) {
            const double x = y * xs;
            const double a = invert_characteristic(d, t, x, x - 2.0, x + 2.0);
            const double w = 1.0 + tau * d.dv0(a);
            const double v = std::exp(0.5 * s) * d.v0(a);
            const double vy = std::exp(-s) * d.dv0(a) / w;  // e^{s/2} e^{-3s/2} v_x
            const double N = std::exp(-s) * d.n0(a) / w;
            ProfileSample p = sample_profile(y);
            const double wy = std::cbrt(y * y) + 1.0;
            sl.max_dev_from_profile = std::max(sl.max_dev_from_profile, std::abs(v - p.u_bar));
            sl.weighted_slope_dev = std::max(sl.weighted_slope_dev, wy * std::abs(vy - p.d1));
            sl.N_weighted_min = std::min(sl.N_weighted_min, wy * N);
            sl.N_weighted_max = std::max(sl.N_weighted_max, wy * N);
            V.push_back(v);
        }
        if (first.empty()) first = V;
        for (std::size_t k = 0; k < V.size(); ++k) rep.drift = std::max(rep.drift, std::abs(V[k] - first[k]));
        rep.max_dev = std::max(rep.max_dev, sl.max_dev_from_profile);
        rep.N_lower = std::min(rep.N_lower, sl.N_weighted_min);
        rep.N_upper = std::max(rep.N_upper, sl.N_weighted_max);
        rep.slices.push_back(sl);
    }
    return rep;
}

}  // namespace dshock
