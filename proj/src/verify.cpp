#include "dshock/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "dshock/burgers_profile.hpp"
#include "dshock/errors.hpp"
#include "dshock/numerics.hpp"

namespace dshock {

namespace {

constexpr double kQuadTol = 1e-12;

double int_rational(double y) {
    return num::integrate([](double v) { return v * v / (1.0 + v * v); }, 0.0, std::abs(y), kQuadTol);
}

// int_0^|y| dv / (v^{2/3} + 8), with v = t^3 removing the cusp at 0.
double int_weight(double y) {
    return num::integrate([](double t) { return 3.0 * t * t / (t * t + 8.0); }, 0.0, std::cbrt(std::abs(y)), kQuadTol);
}

struct Scan {
    double min_margin = INFINITY;
    double at = 0.0;
    double y_lo = INFINITY, y_hi = 0.0;
    std::size_t points = 0;
    void add(double y, double margin) {
        ++points;
        y_lo = std::min(y_lo, std::abs(y));
        y_hi = std::max(y_hi, std::abs(y));
        if (margin < min_margin) {
            min_margin = margin;
            at = y;
        }
    }
    InequalityReport report(const std::string& name) const {
        InequalityReport r;
        r.name = name;
        r.y_lo = y_lo;
        r.y_hi = y_hi;
        r.points = points;
        r.min_margin = min_margin;
        r.at_y = at;
        r.pass = min_margin >= -kInequalitySlack;
        return r;
    }
};

// Weighted sup of a decaying quantity; passes when the sup is attained away
// from the window edge and the outer decade stays below it.
InequalityReport decay_report(const std::string& name, const std::vector<double>& ys,
                              const std::function<double(double)>& g, double y_max) {
    double sup = 0.0, at = 0.0, tail = 0.0;
    for (double y : ys) {
        const double v = g(y);
        if (v > sup) {
            sup = v;
            at = y;
        }
        if (std::abs(y) >= 0.1 * y_max) tail = std::max(tail, v);
    }
    InequalityReport r;
    r.name = name;
    r.y_lo = 0.0;
    r.y_hi = y_max;
    r.points = ys.size();
    r.at_y = at;
    r.min_margin = sup - tail;
    r.pass = std::isfinite(sup) && std::abs(at) < 0.1 * y_max && tail < sup;
    r.note = "C = " + std::to_string(sup) + ", outer-decade max " + std::to_string(tail);
    return r;
}

InequalityReport kernel_report(const std::string& name, const std::vector<double>& ys,
                               const std::function<double(double)>& lhs, const std::function<double(double)>& rhs) {
    double ratio = INFINITY, at = 0.0;
    std::vector<std::pair<double, double>> sides;
    sides.reserve(ys.size());
    for (double y : ys) {
        const double l = lhs(y), r = rhs(y);
        sides.emplace_back(l, r);
        if (l > 0.0 && r / l < ratio) {
            ratio = r / l;
            at = y;
        }
    }
    // Largest lambda on the 1e-3 lattice in (1, 2] with lambda * lhs <= rhs.
    double lam = std::min(2.0, std::floor(ratio / kLambdaStep) * kLambdaStep);
    while (lam > 1.0) {
        bool ok = true;
        for (const auto& [l, r] : sides)
            if (lam * l > r) {
                ok = false;
                break;
            }
        if (ok) break;
        lam -= kLambdaStep;
    }
    const double lam_eval = std::max(lam, 1.0);
    Scan s;
    for (std::size_t k = 0; k < ys.size(); ++k) s.add(ys[k], sides[k].second - lam_eval * sides[k].first);
    InequalityReport rep = s.report(name);
    rep.lambda_found = lam > 1.0 ? lam : std::numeric_limits<double>::quiet_NaN();
    rep.pass = rep.pass && lam > 1.0;
    rep.note = "inf rhs/lhs = " + std::to_string(ratio) + " at y = " + std::to_string(at);
    return rep;
}

}  // namespace

double slope_lower_bound(double y) {
    const double q = 3.0 * y * y;
    return -1.0 / (1.0 + q / std::cbrt((q + 1.0) * (q + 1.0)));
}

double damping_margin(double y) {
    const double y2 = y * y;
    const double lhs = y2 / (5.0 * (1.0 + y2)) + 16.0 * y2 / (5.0 * (1.0 + 8.0 * y2));
    const double rhs = 1.0 + 2.0 * eval_derivative(y, 1) + 2.0 / (1.0 + y2) * (1.5 + profile_over_y(y));
    return rhs - lhs;
}

double uyy_kernel_lhs(double y) {
    if (y == 0.0) return 0.0;
    return std::abs(eval_derivative(y, 2)) * (1.0 + y * y) / (y * y) * int_rational(y);
}

double uyy_kernel_rhs(double y) {
    const double y2 = y * y;
    return 3.0 * y2 / (1.0 + 8.0 * y2) + y2 / (30.0 * (1.0 + y2));
}

double far_kernel_lhs(double y) {
    return std::abs(eval_derivative(y, 2)) * (std::cbrt(y * y) + 8.0) * int_weight(y);
}

double far_kernel_rhs(double y) {
    const double w = std::cbrt(y * y) + 8.0;
    const double ay = std::abs(y);
    // U/y and the averaged weight are even in y.
    return 1.0 - 1.0 / w + 2.0 * eval_derivative(y, 1) -
           2.0 * std::cbrt(y * y) / (3.0 * w) * (1.5 + profile_over_y(y) + int_weight(ay) / ay);
}

std::vector<InequalityReport> check_profile_inequalities(double y_max, std::size_t n) {
    if (!(y_max >= 100.0)) throw UsageError("check_profile_inequalities: y_max must be >= 100");
    if (n < 100000) throw UsageError("check_profile_inequalities: n must be >= 1e5");
    const std::vector<double> ys = num::symmetric_logspace(1e-6, y_max, n / 2);
    std::vector<InequalityReport> out;

    Scan lower, upper;
    for (double y : ys) {
        const double d1 = eval_derivative(y, 1);
        lower.add(y, d1 - slope_lower_bound(y));
        upper.add(y, -d1);
    }
    InequalityReport slope = lower.report("slope_bound");
    if (upper.min_margin < slope.min_margin) {
        slope.min_margin = upper.min_margin;
        slope.at_y = upper.at;
    }
    slope.pass = slope.min_margin >= -kInequalitySlack;
    slope.note = "lower bound margin " + std::to_string(lower.min_margin) + ", upper bound margin " +
                 std::to_string(upper.min_margin);
    out.push_back(slope);

    out.push_back(decay_report(
        "slope_decay", ys, [](double y) { return std::abs(eval_derivative(y, 1)) * std::cbrt(1.0 + y * y); }, y_max));
    out.push_back(decay_report(
        "curvature_decay", ys,
        [](double y) { return std::abs(eval_derivative(y, 2)) * std::pow(1.0 + y * y, 5.0 / 6.0); }, y_max));

    Scan damp;
    for (double y : ys) damp.add(y, damping_margin(y));
    InequalityReport d = damp.report("damping_lower_bound");
    d.note = "equality at y = 0 through the series Ubar/y -> -1";
    out.push_back(d);

    out.push_back(kernel_report("uyy_kernel", ys, uyy_kernel_lhs, uyy_kernel_rhs));

    std::vector<double> far;
    for (double y : ys)
        if (std::abs(y) >= 3.0) far.push_back(y);
    InequalityReport fk = kernel_report("far_field_kernel", far, far_kernel_lhs, far_kernel_rhs);
    fk.note += "; |y| >= 3 only";
    out.push_back(fk);
    return out;
}

TransportSolution integrate_transport(const TransportProblem& p, double s_end, double omega_radius) {
    if (!(p.ds > 0.0) || p.n < 5 || !(p.y_max > 0.0)) throw UsageError("integrate_transport: bad discretization");
    if (!(s_end > p.s0)) throw UsageError("integrate_transport: s_end must exceed s0");
    TransportSolution sol;
    sol.y = num::linspace(-p.y_max, p.y_max, p.n);
    const std::size_t n = p.n;
    const double h = sol.y[1] - sol.y[0];
    sol.f.resize(n);
    for (std::size_t i = 0; i < n; ++i) sol.f[i] = p.f0(sol.y[i]);

    const bool has_kernel = static_cast<bool>(p.K_out);
    auto moment = [&](const std::vector<double>& f, double s) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double wgt = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
            acc += wgt * f[k] * p.K_in(sol.y[k], s);
        }
        return acc * h;
    };
    auto sup_omega = [&](const std::vector<double>& f) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(sol.y[i]) <= omega_radius) m = std::max(m, std::abs(f[i]));
        return m;
    };

    const std::size_t steps = static_cast<std::size_t>(std::ceil((s_end - p.s0) / p.ds - 1e-9));
    const double ds = (s_end - p.s0) / static_cast<double>(steps);
    std::vector<double> fnew(n), foot(n), fmid(n), dmid(n), Nprev(n);
    double s = p.s0;
    for (std::size_t step = 0; step < steps; ++step) {
        const double sm = s + 0.5 * ds;
        const double mom = has_kernel ? moment(sol.f, s) : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = sol.y[i];
            const double ym = y - 0.5 * ds * p.speed(y, s + ds);
            const double yf = y - ds * p.speed(ym, sm);
            if (std::abs(yf) > p.y_max * (1.0 + 1e-12))
                throw DomainError("integrate_transport: characteristic foot left the window at y = " +
                                  std::to_string(y));
            foot[i] = yf;
            fmid[i] = num::interp_cubic(sol.y, sol.f, yf);
            dmid[i] = p.D(0.5 * (y + yf), sm);
            Nprev[i] = has_kernel ? p.K_out(yf, s) * mom : 0.0;
        }
        auto advance = [&](std::size_t i, double G) {
            const double a = dmid[i] * ds;
            const double decay = std::exp(-a);
            const double gain = std::abs(a) < 1e-12 ? ds : (1.0 - decay) / dmid[i];
            return fmid[i] * decay + G * gain;
        };
        for (std::size_t i = 0; i < n; ++i) fnew[i] = advance(i, p.F(0.5 * (sol.y[i] + foot[i]), sm) + Nprev[i]);
        if (has_kernel) {
            const double mom1 = moment(fnew, s + ds);
            for (std::size_t i = 0; i < n; ++i) {
                const double N1 = p.K_out(sol.y[i], s + ds) * mom1;
                const double G = p.F(0.5 * (sol.y[i] + foot[i]), sm) + 0.5 * (Nprev[i] + N1);
                fnew[i] = advance(i, G);
            }
        }
        sol.f.swap(fnew);
        s += ds;
        double sup = 0.0;
        for (double v : sol.f) sup = std::max(sup, std::abs(v));
        sol.s_hist.push_back(s);
        sol.sup_hist.push_back(sup);
        sol.sup_omega_hist.push_back(sup_omega(sol.f));
    }
    sol.s_end = s;
    return sol;
}

namespace {

double burgers_speed(double y, double) { return 1.5 * y + eval_profile(y); }

}  // namespace

MaxPrincipleReport check_max_principle(std::uint64_t seed, std::size_t draws, double s_span) {
    if (draws == 0) throw UsageError("check_max_principle: draws must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    MaxPrincipleReport rep;
    const std::size_t max_attempts = 20 * draws;
    for (std::size_t attempt = 0; attempt < max_attempts && rep.admissible < draws; ++attempt) {
        MaxPrincipleDraw d;
        d.index = attempt;
        d.m0 = 1.0;
        d.lambda_D = 0.5 + 1.5 * U(rng);
        const double bump = U(rng);
        d.delta = 0.1 + 0.8 * U(rng);
        const double theta = 0.1 + 0.85 * U(rng);
        d.F0 = theta * d.m0 * d.lambda_D * (2.0 - 2.0 * d.delta);
        const double omega = 1.0 + 2.0 * U(rng);
        const double kc = -3.0 + 6.0 * U(rng), ksig = 0.5 + 1.5 * U(rng);
        const double fw = 0.5 + 2.0 * U(rng), fr = 2.0 * U(rng);
        const double a1 = U(rng), a2 = U(rng), c0 = -2.0 + 4.0 * U(rng);
        const double radius = 1.0 + 2.0 * U(rng);

        TransportProblem p;
        p.y_max = 20.0;
        p.n = 801;
        p.ds = 5e-3;
        const std::vector<double> grid = num::linspace(-p.y_max, p.y_max, p.n);
        const double h = grid[1] - grid[0];
        double gnorm = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double z = (grid[k] - kc) / ksig;
            gnorm += ((k == 0 || k + 1 == grid.size()) ? 0.5 : 1.0) * std::exp(-z * z);
        }
        gnorm *= h;
        const double lamD = d.lambda_D, delta = d.delta, F0 = d.F0, m0 = d.m0;
        p.D = [=](double y, double) { return lamD + bump * std::exp(-y * y); };
        // int |K| dy' = delta D(y) exactly under the grid trapezoid rule
        p.K_out = [=](double y, double) { return delta * (lamD + bump * std::exp(-y * y)); };
        p.K_in = [=](double yp, double) {
            const double z = (yp - kc) / ksig;
            return std::exp(-z * z) / gnorm;
        };
        p.F = [=](double y, double s) { return F0 * std::sin(fw * y + fr * s); };
        p.speed = burgers_speed;
        p.f0 = [=](double y) {
            const double z = y - c0;
            return m0 * (a1 * std::tanh(omega * y) + a2 * std::exp(-z * z)) / (a1 + a2);
        };
        TransportSolution sol = integrate_transport(p, p.s0 + s_span, radius);
        d.sup_f = 0.0;
        for (double v : sol.f) d.sup_f = std::max(d.sup_f, std::abs(v));
        for (double v : sol.sup_hist) d.sup_f = std::max(d.sup_f, v);
        for (double v : sol.sup_omega_hist) d.sup_omega = std::max(d.sup_omega, v);
        d.admissible = d.sup_omega <= d.m0;
        d.holds = d.sup_f <= 2.0 * d.m0 * (1.0 + 1e-9);
        if (d.admissible) {
            ++rep.admissible;
            if (!d.holds) ++rep.counterexamples;
        }
        rep.draws.push_back(d);
    }
    return rep;
}

DecayCheck check_decay(double lambda_D, double lambda_F, double F0, double s_span) {
    if (!(lambda_D > 0.0) || !(lambda_F >= 0.0) || lambda_D == lambda_F || !(F0 >= 0.0))
        throw UsageError("check_decay: need lambda_D > 0, lambda_F >= 0, lambda_D != lambda_F, F0 >= 0");
    DecayCheck c;
    c.lambda_D = lambda_D;
    c.lambda_F = lambda_F;
    c.F0 = F0;
    TransportProblem p;
    p.y_max = 30.0;
    p.n = 1201;
    p.ds = 2e-3;
    p.speed = burgers_speed;
    p.D = [=](double y, double) { return lambda_D + std::exp(-y * y); };
    p.F = [=](double y, double s) { return F0 * std::exp(-lambda_F * s) * std::cos(y); };
    auto f0 = [](double y) { return 0.5 + 0.5 * std::exp(-y * y) + 0.25 * std::tanh(y); };
    p.f0 = f0;
    const double s_end = p.s0 + s_span;
    TransportSolution sol = integrate_transport(p, s_end);

    // Trace the edge characteristics back to s0.
    auto foot_of = [&](double y) {
        const std::size_t steps = 2000;
        const double h = s_span / static_cast<double>(steps);
        for (std::size_t k = 0; k < steps; ++k) {
            const double k1 = burgers_speed(y, 0), k2 = burgers_speed(y - 0.5 * h * k1, 0),
                         k3 = burgers_speed(y - 0.5 * h * k2, 0), k4 = burgers_speed(y - h * k3, 0);
            y -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        return y;
    };
    const double foot = std::min(std::abs(foot_of(p.y_max)), std::abs(foot_of(-p.y_max)));
    double tail0 = 0.0;
    for (double y : num::linspace(foot, p.y_max, 4001)) tail0 = std::max({tail0, std::abs(f0(y)), std::abs(f0(-y))});
    const double elapsed = s_end - p.s0;
    if (lambda_D > lambda_F) {
        c.bound = tail0 * std::exp(-lambda_D * elapsed) + F0 / (lambda_D - lambda_F) * std::exp(-lambda_F * s_end);
    } else {
        c.bound = tail0 * std::exp(-lambda_D * elapsed) +
                  F0 * std::exp(-p.s0 * lambda_F) / (lambda_F - lambda_D) * std::exp(-lambda_D * elapsed);
    }
    c.y_edge = p.y_max;
    c.f_edge = std::max(std::abs(sol.f.front()), std::abs(sol.f.back()));
    c.holds = c.f_edge <= c.bound;
    return c;
}

}  // namespace dshock
