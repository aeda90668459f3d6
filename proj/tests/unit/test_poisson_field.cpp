#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dshock/errors.hpp"
#include "dshock/poisson_field.hpp"

using namespace dshock;

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

TEST_CASE("uniform density gives zero potential") {
    const auto g = Grid1D::symmetric(20.0, 401);
    std::vector<double> rho(g.n, 1.0), f(g.n, 0.0);
    const auto s = solve_newton(g, rho);
    CHECK(max_abs(s.phi) == 0.0);
    const auto q = solve_greens_iteration(g, f);
    CHECK(max_abs(q.phi) == 0.0);
}

TEST_CASE("potential follows the sign of the density bump") {
    const auto g = Grid1D::symmetric(20.0, 801);
    for (double amp : {0.2, -0.2}) {
        std::vector<double> rho;
        for (double x : g.nodes()) rho.push_back(1.0 + amp * std::exp(-x * x));
        const auto s = solve_newton(g, rho);
        CHECK(std::signbit(s.phi[g.n / 2]) == std::signbit(amp));
        CHECK(s.residual < 1e-9);
    }
}

TEST_CASE("Newton and Green's iteration agree") {
    const auto g = Grid1D::symmetric(30.0, 3001);
    std::vector<double> rho, f;
    for (double x : g.nodes()) {
        f.push_back(0.1 * std::exp(-x * x));
        rho.push_back(1.0 + f.back());
    }
    NewtonOptions no;
    no.tol = 1e-13;
    const auto a = solve_newton(g, rho, no);
    for (auto q : {KernelQuadrature::discrete, KernelQuadrature::exact_cell}) {
        GreensOptions go;
        go.quadrature = q;
        const auto b = solve_greens_iteration(g, f, go);
        double d = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) d = std::max(d, std::abs(a.phi[i] - b.phi[i]));
        // the exact-cell kernel differs from the three-point operator by O(dx^2)
        CHECK(d < (q == KernelQuadrature::discrete ? 1e-12 : 1e-4));
        CHECK(b.contraction <= contraction_bound_c1());
    }
}

TEST_CASE("contraction constant") {
    const double c1 = contraction_bound_c1();
    CHECK(c1 > 0.0);
    CHECK(c1 < 1.0);
    // Lipschitz ratio of e^P - P on |P| <= 1/4, measured
    double worst = 0.0;
    for (double a = -0.25; a <= 0.25; a += 0.01)
        for (double b = a + 0.005; b <= 0.25; b += 0.01)
            worst = std::max(worst, std::abs((std::exp(a) - a) - (std::exp(b) - b)) / (b - a));
    CHECK(worst <= c1);
}

TEST_CASE("node solver matches the uniform solver on a uniform grid") {
    const auto g = Grid1D::symmetric(15.0, 301);
    std::vector<double> rho, mass;
    for (double x : g.nodes()) {
        rho.push_back(1.0 + 0.3 * std::exp(-x * x / 2));
        mass.push_back(rho.back() * g.dx);
    }
    NewtonOptions no;
    no.tol = 1e-14;
    const auto a = solve_newton(g, rho, no);
    const auto b = solve_newton_nodes(g.nodes(), mass, {}, no);
    for (std::size_t i = 0; i < g.n; ++i) CHECK(b.phi[i] == doctest::Approx(a.phi[i]).epsilon(1e-10).scale(1.0));
    std::vector<double> bad(mass);
    bad[3] = 0.0;
    CHECK_THROWS_AS(solve_newton_nodes(g.nodes(), bad, {}), DomainError);
}

TEST_CASE("energy of simple states") {
    FluidState s;
    for (int i = 0; i <= 100; ++i) s.x.push_back(-5.0 + 0.1 * i);
    s.rho.assign(s.size(), 1.0);
    s.u.assign(s.size(), 0.0);
    s.phi.assign(s.size(), 0.0);
    CHECK(energy(s).total == 0.0);
    s.u.assign(s.size(), 2.0);
    CHECK(energy(s).kinetic == doctest::Approx(2.0 * 10.0));
    FluidState none = s;
    none.phi.clear();
    CHECK_THROWS_AS(energy(none), UsageError);
}

TEST_CASE("electron energy integrand") {
    for (double p : {-3.0, -0.5, -1e-3, 0.0, 1e-5, 0.009, 0.011, 2.0}) {
        const double direct = (p - 1.0) * std::exp(p) + 1.0;
        // the direct form cancels near 0, so it is only good to ~1e-16 absolute
        CHECK(std::abs(electron_density_energy(p) - direct) <= 1e-15 + 1e-12 * direct);
        CHECK(electron_density_energy(p) >= 0.0);
    }
}

TEST_CASE("field energy is bounded by the density L2 defect") {
    const auto g = Grid1D::symmetric(20.0, 2001);
    FluidState s;
    s.x = g.nodes();
    for (double x : s.x) s.rho.push_back(1.0 + 0.5 * std::exp(-x * x) - 0.2 * std::exp(-(x - 3) * (x - 3)));
    s.u.assign(g.n, 0.0);
    s.phi = solve_newton(g, s.rho).phi;
    const auto r = field_energy_vs_l2(s);
    CHECK(r.lhs > 0.0);
    CHECK(r.lhs <= r.rhs);
}

TEST_CASE("potential bounds") {
    CHECK(potential_V(0.0) == 0.0);
    const auto z = potential_bounds(0.0);
    CHECK(z.M1 == 0.0);
    CHECK(z.m1 == 1.0);
    CHECK_THROWS_AS(potential_bounds(-1.0), UsageError);

    const auto b = potential_bounds(0.3);
    CHECK(potential_V(b.z_plus) == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(potential_V(b.z_minus) == doctest::Approx(0.3).epsilon(1e-10));
    CHECK(b.z_minus < 0.0);
    CHECK(b.M1 == std::max(b.z_plus, -b.z_minus));

    // V(z) ~ z^2/2 near 0
    CHECK(potential_V(1e-3) == doctest::Approx(0.5e-6).epsilon(1e-3));

    FluidState flat;
    flat.x = {0, 1, 2, 3, 4};
    flat.rho.assign(5, 1.0);
    flat.u.assign(5, 0.0);
    flat.phi.assign(5, 0.0);
    const auto c = potential_bounds_check(flat, 0.0);
    CHECK(c.within);
    CHECK(c.phi_sup == 0.0);
}

TEST_CASE("smallness and weighted bounds bookkeeping") {
    const auto g = Grid1D::symmetric(10.0, 201);
    std::vector<double> f(g.n, 0.0);
    const auto sm = greens_smallness(g, f, 6.85);
    CHECK(sm.C_f == 0.0);
    CHECK(sm.satisfied);
    const auto sol = solve_greens_iteration(g, f);
    const auto w = weighted_bounds(sol, f, 6.85);
    CHECK(w.holds_stated);
    CHECK(w.holds_proved);
}
