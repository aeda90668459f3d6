#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dshock/burgers_profile.hpp"
#include "dshock/errors.hpp"
#include "dshock/numerics.hpp"
#include "dshock/pressureless_euler.hpp"

using namespace dshock;

TEST_CASE("identity at the initial time") {
    const auto d = pe_gauss();
    const std::vector<double> a{-2.0, -0.5, 0.0, 0.7, 3.0};
    const auto s = exact_state(d, d.t0, a);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(s.x[i] == a[i]);
        CHECK(s.v[i] == d.v0(a[i]));
        CHECK(s.n[i] == 1.0);
    }
}

TEST_CASE("lifespans") {
    const auto g = lifespan(pe_gauss());
    CHECK(g.blows_up);
    CHECK(g.elapsed == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.t_star == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(std::abs(g.alpha_star) < 1e-6);

    const auto s = lifespan(pe_sech());
    CHECK(s.elapsed == doctest::Approx(0.5).epsilon(1e-12));

    PEInitialData inc = pe_gauss();
    inc.v0 = [](double x) { return std::atan(x); };
    inc.dv0 = [](double x) { return 1.0 / (1.0 + x * x); };
    CHECK_FALSE(lifespan(inc).blows_up);
}

TEST_CASE("density along the collapsing characteristic") {
    const auto d = pe_gauss();
    const std::vector<double> a{0.0};
    for (double el : {0.1, 0.5, 0.9, 0.999}) {
        const auto s = exact_state(d, d.t0 + el, a);
        CHECK(s.n[0] == doctest::Approx(1.0 / (1.0 - el)).epsilon(1e-13));
    }
    CHECK_THROWS_AS(exact_state(d, d.t0 + 1.0, a), DomainError);
}

TEST_CASE("exact state satisfies the equations") {
    // v constant along x(t); n v_x and mass checked by finite differences in t
    const auto d = pe_sech();
    const auto a = num::linspace(-2.0, 2.0, 41);
    const double t = d.t0 + 0.3, h = 1e-5;
    const auto s0 = exact_state(d, t - h, a), s1 = exact_state(d, t + h, a), s = exact_state(d, t, a);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK((s1.x[i] - s0.x[i]) / (2 * h) == doctest::Approx(s.v[i]).epsilon(1e-8));
        CHECK(s.n[i] * s.w[i] == doctest::Approx(1.0).epsilon(1e-14));
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(invert_characteristic(d, t, s.x[i], s.x[i] - 1, s.x[i] + 1) == doctest::Approx(a[i]).epsilon(1e-13).scale(1.0));
}

TEST_CASE("the profile is a steady state in self-similar variables") {
    const auto s = num::linspace(0.0, 6.0, 13);
    const auto y = num::symmetric_logspace(1e-3, 1e3, 200);
    const auto r = selfsim_check(pe_profile(), s, y);
    CHECK(r.drift < 1e-8);
    CHECK(r.max_dev < 1e-8);
    CHECK(r.N_lower > 0.0);
    CHECK(r.N_upper < 1e3);
    // N = e^{-s} n and n = 1 at s = 0 on the initial slice
    CHECK(r.slices.front().N_weighted_min == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(selfsim_check(pe_sech(), s, y), UsageError);
}

TEST_CASE("presets") {
    CHECK(pe_preset("gauss").name == "gauss");
    CHECK(pe_preset("profile").name == "profile");
    CHECK_THROWS_AS(pe_preset("box"), UsageError);
    const auto d = to_initial_data(pe_gauss());
    CHECK(d.t0 == -1.0);
    CHECK(d.u[1](0.0) == -1.0);
}
