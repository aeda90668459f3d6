#include "dshock/poisson_field.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "dshock/errors.hpp"

namespace dshock {

namespace {

struct NodeSystem {
    std::span<const double> x;
    std::span<const double> mass;
    std::vector<double> inv_dx;  // 1/(x_{i+1}-x_i), size n-1
    std::vector<double> cell;    // h_i, half cells at the ends

    NodeSystem(std::span<const double> x_, std::span<const double> m_) : x(x_), mass(m_) {
        const std::size_t n = x.size();
        inv_dx.resize(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double d = x[i + 1] - x[i];
            if (!(d > 0.0)) throw DomainError("Poisson nodes must be strictly increasing");
            inv_dx[i] = 1.0 / d;
        }
        cell.resize(n);
        cell[0] = 0.5 * (x[1] - x[0]);
        cell[n - 1] = 0.5 * (x[n - 1] - x[n - 2]);
        for (std::size_t i = 1; i + 1 < n; ++i) cell[i] = 0.5 * (x[i + 1] - x[i - 1]);
    }

    std::size_t n() const { return x.size(); }

    // Interior rows; r[0] and r[n-1] are zero.
    void residual(std::span<const double> phi, std::vector<double>& r) const {
        const std::size_t n = phi.size();
        r.assign(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i)
            r[i] = -(phi[i + 1] - phi[i]) * inv_dx[i] + (phi[i] - phi[i - 1]) * inv_dx[i - 1] - mass[i] +
                   cell[i] * std::exp(phi[i]);
    }

    double merit(const std::vector<double>& r) const {
        double s = 0.0;
        for (std::size_t i = 1; i + 1 < r.size(); ++i) s += r[i] * r[i] / cell[i];
        return s;
    }

    double scaled_max(const std::vector<double>& r) const {
        double m = 0.0;
        for (std::size_t i = 1; i + 1 < r.size(); ++i) m = std::max(m, std::abs(r[i]) / cell[i]);
        return m;
    }
};

// Damped Newton. stop_on_residual selects the uniform-grid criterion
// (scaled residual <= tol); otherwise the update size is used.
int newton_core(const NodeSystem& sys, std::vector<double>& phi, const NewtonOptions& opt, bool stop_on_residual,
                double& final_residual) {
    const std::size_t n = sys.n();
    const std::size_t m = n - 2;
    std::vector<double> r, r_try, sub(m), diag(m), sup(m), rhs(m), trial(n);
    sys.residual(phi, r);
    double merit = sys.merit(r);
    for (int it = 0; it < opt.max_iter; ++it) {
        double scaled = sys.scaled_max(r);
        if (stop_on_residual && scaled <= opt.tol) {
            final_residual = scaled;
            return it;
        }
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            sub[k] = -sys.inv_dx[i - 1];
            sup[k] = -sys.inv_dx[i];
            diag[k] = sys.inv_dx[i] + sys.inv_dx[i - 1] + sys.cell[i] * std::exp(phi[i]);
            rhs[k] = -r[i];
        }
        num::solve_tridiagonal(sub, diag, sup, rhs);
        double step_max = 0.0;
        for (double d : rhs) step_max = std::max(step_max, std::abs(d));

        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h) {
            trial = phi;
            for (std::size_t k = 0; k < m; ++k) trial[k + 1] += lambda * rhs[k];
            sys.residual(trial, r_try);
            double mt = sys.merit(r_try);
            if (mt < merit || lambda * step_max <= opt.tol) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            final_residual = scaled;
            throw SolverError("Newton line search failed after max halvings", scaled);
        }
        phi.swap(trial);
        r.swap(r_try);
        merit = sys.merit(r);
        if (!stop_on_residual && lambda * step_max <= opt.tol) {
            final_residual = sys.scaled_max(r);
            return it + 1;
        }
    }
    final_residual = sys.scaled_max(r);
    throw SolverError("Newton did not converge within max iterations", final_residual);
}

void check_density(std::span<const double> rho) {
    for (double v : rho)
        if (!(v > 0.0)) throw DomainError("density must be positive everywhere");
}

std::vector<double> second_derivative_uniform(std::span<const double> phi_x, double h) {
    return num::diff_uniform(phi_x, h);
}

}  // namespace

FieldSolution solve_newton(const Grid1D& grid, std::span<const double> rho, const NewtonOptions& opt) {
    grid.validate();
    if (rho.size() != grid.n) throw UsageError("solve_newton: rho size does not match grid");
    check_density(rho);
    std::vector<double> x = grid.nodes();
    std::vector<double> mass(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) mass[i] = rho[i] * grid.dx;
    NodeSystem sys(x, mass);
    for (std::size_t i = 1; i + 1 < grid.n; ++i) sys.cell[i] = grid.dx;  // exact, avoids rounding in x
    FieldSolution sol;
    sol.grid = grid;
    sol.phi.assign(grid.n, 0.0);
    sol.iterations = newton_core(sys, sol.phi, opt, true, sol.residual);
    sol.x = std::move(x);
    sol.phi_x = num::diff_uniform(sol.phi, grid.dx);
    sol.phi_xx = second_derivative_uniform(sol.phi_x, grid.dx);
    return sol;
}

NodeField solve_newton_nodes(std::span<const double> x, std::span<const double> mass,
                             std::span<const double> phi_guess, const NewtonOptions& opt) {
    const std::size_t n = x.size();
    if (n < 3 || mass.size() != n) throw UsageError("solve_newton_nodes: size mismatch");
    for (double m : mass)
        if (!(m > 0.0)) throw DomainError("cell masses must be positive");
    NodeSystem sys(x, mass);
    NodeField out;
    if (phi_guess.size() == n)
        out.phi.assign(phi_guess.begin(), phi_guess.end());
    else
        out.phi.assign(n, 0.0);
    out.phi.front() = 0.0;
    out.phi.back() = 0.0;
    out.iterations = newton_core(sys, out.phi, opt, false, out.residual);
    out.phi_x.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            out.phi_x[i] = (out.phi[1] - out.phi[0]) * sys.inv_dx[0];
        } else if (i + 1 == n) {
            out.phi_x[i] = (out.phi[i] - out.phi[i - 1]) * sys.inv_dx[i - 1];
        } else {
            const double dl = x[i] - x[i - 1], dr = x[i + 1] - x[i];
            const double el = (out.phi[i] - out.phi[i - 1]) / dl, er = (out.phi[i + 1] - out.phi[i]) / dr;
            out.phi_x[i] = (el * dr + er * dl) / (dl + dr);
        }
    }
    out.cell = std::move(sys.cell);
    return out;
}

double contraction_bound_c1() {
    const double a = 1.0 - 2.0 * std::exp(-0.25) * (1.0 - std::exp(-0.5));
    const double b = -2.0 * std::exp(0.25) * (1.0 - std::exp(0.5)) - 1.0;
    return std::max(a, b);
}

namespace {

// Phi = K * g with K the continuous kernel 0.5 e^{-|y-y'|} restricted to the
// grid, g piecewise linear between nodes.
void apply_exact_cell_kernel(const Grid1D& grid, std::span<const double> g, std::vector<double>& out) {
    const std::size_t n = grid.n;
    const double h = grid.dx;
    const double e = std::exp(-h);
    const double b = (h - 1.0 + e) / h;  // weight of the near node
    const double a = (1.0 - e) - b;      // weight of the far node
    std::vector<double> left(n, 0.0), right(n, 0.0);
    for (std::size_t j = 1; j < n; ++j) left[j] = e * left[j - 1] + a * g[j - 1] + b * g[j];
    for (std::size_t j = n - 1; j-- > 0;) right[j] = e * right[j + 1] + a * g[j + 1] + b * g[j];
    out.resize(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = 0.5 * (left[j] + right[j]);
}

void apply_discrete_kernel(const Grid1D& grid, std::span<const double> g, std::vector<double>& out) {
    const std::size_t n = grid.n;
    const std::size_t m = n - 2;
    const double k = 1.0 / (grid.dx * grid.dx);
    std::vector<double> sub(m, -k), diag(m, 1.0 + 2.0 * k), sup(m, -k), rhs(g.begin() + 1, g.end() - 1);
    num::solve_tridiagonal(sub, diag, sup, rhs);
    out.assign(n, 0.0);
    std::copy(rhs.begin(), rhs.end(), out.begin() + 1);
}

}  // namespace

FieldSolution solve_greens_iteration(const Grid1D& grid, std::span<const double> f, const GreensOptions& opt) {
    grid.validate();
    if (f.size() != grid.n) throw UsageError("solve_greens_iteration: forcing size does not match grid");
    const std::size_t n = grid.n;
    FieldSolution sol;
    sol.grid = grid;
    sol.x = grid.nodes();
    std::vector<double> phi(n, 0.0), next, g(n);
    double prev_diff = INFINITY;
    double worst_ratio = 0.0;
    int non_decreasing = 0;
    bool converged = false;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) g[i] = f[i] - std::expm1(phi[i]) + phi[i];
        if (opt.quadrature == KernelQuadrature::discrete)
            apply_discrete_kernel(grid, g, next);
        else
            apply_exact_cell_kernel(grid, g, next);
        double diff = 0.0;
        for (std::size_t i = 0; i < n; ++i) diff = std::max(diff, std::abs(next[i] - phi[i]));
        phi.swap(next);
        if (std::isfinite(prev_diff) && prev_diff > 1e-13) worst_ratio = std::max(worst_ratio, diff / prev_diff);
        if (diff >= prev_diff && diff > 0.0) {
            if (++non_decreasing >= 10)
                throw SolverError("Green's iteration: successive differences non-decreasing for 10 steps", diff);
        } else {
            non_decreasing = 0;
        }
        prev_diff = diff;
        if (diff <= opt.tol) {
            converged = true;
            ++it;
            break;
        }
    }
    if (!converged) throw SolverError("Green's iteration did not converge", prev_diff);
    sol.iterations = it;
    sol.contraction = worst_ratio;
    const double k = 1.0 / (grid.dx * grid.dx);
    double res = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        double r = -(phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) * k - f[i] - 1.0 + std::exp(phi[i]);
        res = std::max(res, std::abs(r));
    }
    sol.residual = res;
    sol.phi = std::move(phi);
    sol.phi_x = num::diff_uniform(sol.phi, grid.dx);
    sol.phi_xx = second_derivative_uniform(sol.phi_x, grid.dx);
    return sol;
}

SmallnessCheck greens_smallness(const Grid1D& grid, std::span<const double> f, double sup_I) {
    SmallnessCheck c;
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double y = grid.x(i);
        c.C_f = std::max(c.C_f, std::cbrt(y * y) * std::abs(f[i]));
    }
    c.sup_I = sup_I;
    c.cond1 = c.C_f * sup_I;
    c.cond2 = std::exp(0.25) * c.C_f * sup_I * sup_I;
    c.satisfied = c.cond1 <= 0.25 && c.cond2 <= 2.0;
    return c;
}

WeightedBounds weighted_bounds(const FieldSolution& sol, std::span<const double> f, double sup_I) {
    WeightedBounds w;
    w.sup_I = sup_I;
    const std::vector<double>* d[3] = {&sol.phi, &sol.phi_x, &sol.phi_xx};
    for (std::size_t i = 0; i < sol.x.size(); ++i) {
        const double y = sol.x[i];
        const double y23 = std::cbrt(y * y);
        w.C_f = std::max(w.C_f, y23 * std::abs(f[i]));
        for (int k = 0; k < 3; ++k) w.weighted_sup[k] = std::max(w.weighted_sup[k], (y23 + 1.0) * std::abs((*d[k])[i]));
    }
    w.holds_stated = w.holds_proved = true;
    for (double v : w.weighted_sup) {
        if (v > w.C_f) w.holds_stated = false;
        if (v > w.C_f * sup_I) w.holds_proved = false;
    }
    return w;
}

double electron_density_energy(double phi) {
    if (std::abs(phi) < 1e-2) {
        const double p = phi;
        return p * p * (0.5 + p * (1.0 / 3.0 + p * (0.125 + p * (1.0 / 30.0 + p / 144.0))));
    }
    return phi * std::exp(phi) - std::expm1(phi);
}

EnergyBreakdown energy(const FluidState& s) {
    if (!s.has_phi()) throw UsageError("energy: state has no converged potential");
    const std::size_t n = s.size();
    EnergyBreakdown e;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dx = s.x[i + 1] - s.x[i];
        const double k0 = 0.5 * s.rho[i] * s.u[i] * s.u[i], k1 = 0.5 * s.rho[i + 1] * s.u[i + 1] * s.u[i + 1];
        e.kinetic += 0.5 * dx * (k0 + k1);
        const double dphi = s.phi[i + 1] - s.phi[i];
        e.field += 0.5 * dphi * dphi / dx;
        e.electron += 0.5 * dx * (electron_density_energy(s.phi[i]) + electron_density_energy(s.phi[i + 1]));
    }
    e.total = e.kinetic + e.field + e.electron;
    return e;
}

FieldEnergyL2 field_energy_vs_l2(const FluidState& s) {
    if (!s.has_phi()) throw UsageError("field_energy_vs_l2: state has no converged potential");
    EnergyBreakdown e = energy(s);
    FieldEnergyL2 r;
    r.lhs = 2.0 * e.field + e.electron;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        const double dx = s.x[i + 1] - s.x[i];
        const double a = s.rho[i] - 1.0, b = s.rho[i + 1] - 1.0;
        r.rhs += 0.5 * dx * (a * a + b * b);
    }
    return r;
}

double potential_V(double z) {
    if (z == 0.0) return 0.0;
    auto integrand = [](double t) { return std::sqrt(2.0 * electron_density_energy(t)); };
    const double lo = std::min(0.0, z), hi = std::max(0.0, z);
    return num::integrate(integrand, lo, hi, 1e-13);
}

PotentialBounds potential_bounds(double H0) {
    if (!(H0 >= 0.0) || !std::isfinite(H0)) throw UsageError("potential_bounds: H0 must be finite and >= 0");
    PotentialBounds b;
    b.H0 = H0;
    if (H0 == 0.0) return b;
    auto invert = [H0](double sign) {
        double hi = 1.0;
        while (potential_V(sign * hi) < H0) hi *= 2.0;
        auto g = [&](double z) { return potential_V(sign * z) - H0; };
        boost::math::tools::eps_tolerance<double> tol(50);
        auto r = boost::math::tools::bisect(g, 0.0, hi, tol);
        return 0.5 * (r.first + r.second);
    };
    b.z_plus = invert(1.0);
    b.z_minus = -invert(-1.0);
    b.M1 = std::max(b.z_plus, -b.z_minus);
    b.m1 = std::exp(-b.M1);
    b.m2 = std::exp(b.M1);
    return b;
}

PotentialBoundsReport potential_bounds_check(const FluidState& state, double H0) {
    PotentialBoundsReport r;
    r.bounds = potential_bounds(H0);
    if (state.has_phi()) {
        for (double p : state.phi) r.phi_sup = std::max(r.phi_sup, std::abs(p));
        if (state.size() >= 5) {
            auto px = num::diff_nonuniform(state.x, state.phi);
            for (double v : px) r.phi_x_sup = std::max(r.phi_x_sup, std::abs(v));
        }
    }
    r.within = r.phi_sup <= r.bounds.M1 * (1.0 + 1e-12) + 1e-15;
    return r;
}

}  // namespace dshock
