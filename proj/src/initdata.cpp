#include "dshock/initdata.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include "dshock/burgers_profile.hpp"
#include "dshock/errors.hpp"
#include "dshock/numerics.hpp"

namespace dshock {

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::canonical: return "canonical";
        case Provenance::figure1: return "figure1";
        default: return "custom";
    }
}

InitialData canonical_data(double eps) {
    if (!(eps > 0.0 && eps <= 0.2)) throw UsageError("canonical_data: eps must lie in (0, 0.2]");
    InitialData d;
    d.eps = eps;
    d.t0 = -eps;
    d.provenance = Provenance::canonical;
    d.rho = {[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
    const double ys = std::pow(eps, -1.5);
    const double sq = std::sqrt(eps);
    // d^n u0 = eps^{1/2 - 3n/2} Ubar^{(n)}(x eps^{-3/2}).
    const std::array<double, 5> scale = {sq, 1.0 / eps, 1.0 / (eps * eps * sq), std::pow(eps, -4.0),
                                         std::pow(eps, -5.5)};
    d.u[0] = [=](double x) { return scale[0] * eval_profile(x * ys); };
    d.u[1] = [=](double x) { return eval_derivative(x * ys, 1) / eps; };
    for (int k = 2; k <= 4; ++k) d.u[k] = [=](double x) { return scale[k] * eval_derivative(x * ys, k); };
    return d;
}

InitialData figure1_data() {
    InitialData d;
    d.eps = 0.5;
    d.t0 = 0.0;
    d.provenance = Provenance::figure1;
    d.rho = {[](double) { return 1.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
    auto S = [](double x) { return 1.0 / std::cosh(2.0 * x); };
    d.u[0] = [=](double x) { return -S(x) * std::tanh(2.0 * x); };
    d.u[1] = [=](double x) {
        const double s = S(x);
        return 2.0 * s * (1.0 - 2.0 * s * s);
    };
    d.u[2] = [=](double x) {
        const double s = S(x);
        return 4.0 * s * std::tanh(2.0 * x) * (6.0 * s * s - 1.0);
    };
    d.u[3] = [=](double x) {
        const double s = S(x), s2 = s * s;
        return 8.0 * s * (24.0 * s2 * s2 - 20.0 * s2 + 1.0);
    };
    d.u[4] = [=](double x) {
        const double s = S(x), s2 = s * s;
        return -16.0 * s * std::tanh(2.0 * x) * (120.0 * s2 * s2 - 60.0 * s2 + 1.0);
    };
    return d;
}

InitialData custom_from_samples(std::span<const double> x, std::span<const double> rho0, std::span<const double> u0,
                                double eps) {
    const std::size_t n = x.size();
    if (n < 8 || rho0.size() != n || u0.size() != n) throw UsageError("custom data: need >= 8 matching samples");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (!(x[i + 1] > x[i])) throw UsageError("custom data: x must be strictly increasing");
    for (double r : rho0)
        if (!(r > 0.0)) throw DomainError("custom data: rho0 must be positive");
    auto xs = std::make_shared<std::vector<double>>(x.begin(), x.end());
    std::array<std::shared_ptr<std::vector<double>>, 5> ud;
    ud[0] = std::make_shared<std::vector<double>>(u0.begin(), u0.end());
    for (int k = 1; k < 5; ++k) ud[k] = std::make_shared<std::vector<double>>(num::diff_nonuniform(*xs, *ud[k - 1]));
    std::array<std::shared_ptr<std::vector<double>>, 3> rd;
    rd[0] = std::make_shared<std::vector<double>>(rho0.begin(), rho0.end());
    for (int k = 1; k < 3; ++k) rd[k] = std::make_shared<std::vector<double>>(num::diff_nonuniform(*xs, *rd[k - 1]));
    InitialData d;
    d.eps = eps;
    d.t0 = 0.0;
    d.provenance = Provenance::custom;
    for (int k = 0; k < 5; ++k) d.u[k] = [xs, v = ud[k]](double q) { return num::interp_cubic(*xs, *v, q); };
    for (int k = 0; k < 3; ++k) d.rho[k] = [xs, v = rd[k]](double q) { return num::interp_cubic(*xs, *v, q); };
    return d;
}

double I_weight(double y, double quad_tol) {
    // Split at y' = 0 and y' = y; the outer pieces are Gamma functions and the
    // middle piece becomes smooth under y' = v^3.
    const double a = std::abs(y);
    const double g13 = boost::math::tgamma(1.0 / 3.0);
    double J = std::exp(-a) * g13;
    if (a > 0.0) {
        // The integrand is below e^{-50} for v^3 < a - 50; skip that part.
        if (a < 100.0) {
            const double c = std::cbrt(a), v0 = std::cbrt(std::max(0.0, a - 50.0));
            J += 3.0 * num::integrate([a](double v) { return std::exp(v * v * v - a); }, v0, c, quad_tol);
        } else {
            // z = a - v^3; the spike at v = a^{1/3} gets too narrow in v
            J += num::integrate([a](double z) { return std::exp(-z) / std::cbrt((a - z) * (a - z)); }, 0.0, 50.0,
                                quad_tol);
        }
        J += a < 600.0 ? std::exp(a) * boost::math::tgamma(1.0 / 3.0, a)
                       : std::pow(a, -2.0 / 3.0) * (1.0 - 2.0 / (3.0 * a));
    } else {
        J += g13;
    }
    return (std::cbrt(a * a) + 1.0) * J;
}

AConstant compute_A(double quad_tol) {
    if (!(quad_tol > 0.0 && quad_tol <= 1e-3)) throw UsageError("compute_A: quad_tol must lie in (0, 1e-3]");
    const double inner = std::min(1e-12, quad_tol * 1e-3);
    // Coarse log scan of y >= 0 (I is even), then Brent refinement.
    std::vector<double> ys = {0.0};
    for (int k = 0; k <= 400; ++k) ys.push_back(std::pow(10.0, -6.0 + 9.0 * k / 400.0));
    double best = -1.0;
    std::size_t ib = 0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double v = I_weight(ys[i], inner);
        if (!(v > 0.0) || !std::isfinite(v)) throw NumericError("compute_A: I(y) not positive/finite");
        if (v > best) {
            best = v;
            ib = i;
        }
    }
    const double lo = ys[ib == 0 ? 0 : ib - 1];
    const double hi = ys[std::min(ib + 1, ys.size() - 1)];
    auto neg = [inner](double y) { return -I_weight(y, inner); };
    auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 40);
    AConstant out;
    out.sup_I = std::max(best, -r.second);
    out.argmax_y = (-r.second >= best) ? r.first : ys[ib];
    out.A = std::min(1.0 / (8.0 * out.sup_I), std::exp(-0.25) / (out.sup_I * out.sup_I));
    return out;
}

bool AdmissibilityReport::all_pass() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const ConditionResult& c) { return c.pass; });
}

const ConditionResult& AdmissibilityReport::get(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return c;
    throw UsageError("no condition named " + name);
}

AdmissibilityReport validate(const InitialData& d, double eps, double a, double b, const AConstant& A, std::size_t n) {
    if (!(eps > 0.0) || !(b > a)) throw UsageError("validate: need eps > 0 and a < b");
    AdmissibilityReport rep;
    rep.A_value = A.A;
    rep.sup_I = A.sup_I;
    const double e32 = std::pow(eps, 1.5);

    // Dense grid: uniform on [a,b] plus log-clustered points on the eps^{3/2} scale.
    std::vector<double> xs = num::linspace(a, b, n);
    for (double y : num::symmetric_logspace(1e-4, 1e4, 4000)) {
        const double x = y * e32;
        if (x > a && x < b) xs.push_back(x);
    }
    std::sort(xs.begin(), xs.end());

    // Center values.
    const std::array<double, 4> target = {0.0, -1.0 / eps, 0.0, 6.0 * std::pow(eps, -4.0)};
    const std::array<double, 4> scale = {std::sqrt(eps), 1.0 / eps, std::pow(eps, -2.5), std::pow(eps, -4.0)};
    const char* cname[4] = {"center_u0", "center_du0", "center_d2u0", "center_d3u0"};
    for (int k = 0; k < 4; ++k) {
        ConditionResult c;
        c.name = cname[k];
        c.margin = 1e-9 - std::abs(d.u[k](0.0) - target[k]) / scale[k];
        c.pass = c.margin >= 0.0;
        c.note = "relative deviation at x = 0 against 1e-9";
        rep.conditions.push_back(c);
    }

    // Sup bounds on derivatives 1..4.
    const std::array<double, 4> bound = {1.0 / eps, std::pow(eps, -2.5), 7.0 * std::pow(eps, -4.0), std::pow(eps, -5.5)};
    const char* bname[4] = {"bound_du0", "bound_d2u0", "bound_d3u0", "bound_d4u0"};
    for (int k = 0; k < 4; ++k) {
        double sup = 0.0, at = 0.0;
        for (double x : xs) {
            const double v = std::abs(d.u[k + 1](x));
            if (v > sup) {
                sup = v;
                at = x;
            }
        }
        ConditionResult c;
        c.name = bname[k];
        c.margin = 1.0 - sup / bound[k];
        c.at_x = at;
        c.pass = c.margin >= -1e-12;
        c.note = "relative margin 1 - sup/bound";
        rep.conditions.push_back(c);
    }

    // Slope localization against the profile.
    {
        ConditionResult c;
        c.name = "slope_localization";
        c.margin = INFINITY;
        for (double x : xs) {
            const double y = x / e32;
            const double lhs = std::abs(eps * d.u[1](x) - eval_derivative(y, 1));
            const double y2 = y * y;
            const double rhs = std::min(y2 / (40.0 * (1.0 + y2)), 22.0 / (25.0 * (8.0 + std::cbrt(y2))));
            if (rhs - lhs < c.margin) {
                c.margin = rhs - lhs;
                c.at_x = x;
            }
        }
        c.pass = c.margin >= -1e-12;
        c.note = "absolute margin min(rhs - lhs)";
        rep.conditions.push_back(c);
    }

    // Far-field slope, finite-domain stand-in for a limsup at infinity.
    {
        ConditionResult c;
        c.name = "far_field_slope";
        c.surrogate = true;
        const double cut = 0.9 * std::max(std::abs(a), std::abs(b));
        double sup = 0.0;
        for (double x : xs) {
            if (std::abs(x) < cut) continue;
            const double v = std::cbrt(x * x) * std::abs(d.u[1](x));
            if (v > sup) {
                sup = v;
                c.at_x = x;
            }
        }
        c.margin = 0.5 - sup;
        c.pass = c.margin >= 0.0;
        c.note = "surrogate: sup over |x| >= 0.9 max|domain|, not a limit";
        rep.conditions.push_back(c);
    }

    // Density localization and positivity.
    {
        ConditionResult c, p;
        c.name = "density_localization";
        p.name = "density_positive";
        c.margin = INFINITY;
        p.margin = INFINITY;
        for (double x : xs) {
            const double r = d.rho[0](x);
            const double y = x / e32;
            const double rhs = A.A / (2.0 * (8.0 + std::cbrt(y * y)));
            const double m = rhs - eps * std::abs(r - 1.0);
            if (m < c.margin) {
                c.margin = m;
                c.at_x = x;
            }
            if (r < p.margin) {
                p.margin = r;
                p.at_x = x;
            }
        }
        c.pass = c.margin >= 0.0;
        c.note = "absolute margin min(rhs - lhs)";
        p.pass = p.margin > 0.0;
        p.note = "margin is inf rho0";
        rep.conditions.push_back(c);
        rep.conditions.push_back(p);
    }
    return rep;
}

}  // namespace dshock
