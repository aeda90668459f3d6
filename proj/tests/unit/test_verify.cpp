#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "dshock/burgers_profile.hpp"
#include "dshock/errors.hpp"
#include "dshock/verify.hpp"

using namespace dshock;

TEST_CASE("slope bound is an equality at the origin") {
    CHECK(slope_lower_bound(0.0) == -1.0);
    CHECK(eval_derivative(0.0, 1) - slope_lower_bound(0.0) == 0.0);
    for (double y : {1e-3, 0.5, 3.0, 1e3}) {
        CHECK(slope_lower_bound(y) <= eval_derivative(y, 1));
        CHECK(eval_derivative(y, 1) <= 0.0);
    }
}

TEST_CASE("damping margin vanishes at the origin") {
    CHECK(std::abs(damping_margin(0.0)) < 1e-15);
    for (double y : {1e-6, 1e-4, 1e-2}) CHECK(damping_margin(y) >= -kInequalitySlack);
}

TEST_CASE("kernel inequality sides") {
    CHECK(uyy_kernel_lhs(0.0) == 0.0);
    CHECK(uyy_kernel_rhs(0.0) == 0.0);
    for (double y : {0.1, 1.0, 10.0, 300.0}) {
        CHECK(uyy_kernel_lhs(y) <= uyy_kernel_rhs(y));
        CHECK(uyy_kernel_lhs(-y) == doctest::Approx(uyy_kernel_lhs(y)));
        CHECK(far_kernel_lhs(y + 3) <= far_kernel_rhs(y + 3));
    }
}

TEST_CASE("profile inequalities on the default grid") {
    const auto reps = check_profile_inequalities();
    CHECK(reps.size() == 6);
    for (const auto& r : reps) {
        CHECK_MESSAGE(r.pass, r.name << ": " << r.note);
        if (r.name != "far_field_kernel") CHECK(r.points >= 100000);
        if (r.name == "uyy_kernel" || r.name == "far_field_kernel") CHECK(r.lambda_found > 1.0);
    }
    CHECK_THROWS_AS(check_profile_inequalities(10.0, 100000), UsageError);
}

TEST_CASE("pure damping transport is exact") {
    TransportProblem p;
    const double lam = 0.7;
    p.D = [=](double, double) { return lam; };
    p.F = [](double, double) { return 0.0; };
    p.speed = [](double, double) { return 0.0; };
    p.f0 = [](double y) { return std::exp(-y * y) + 0.1; };
    p.y_max = 10.0;
    p.n = 201;
    p.ds = 0.01;
    p.s0 = 1.0;
    const auto sol = integrate_transport(p, 3.0);
    CHECK(sol.s_end == doctest::Approx(3.0));
    for (std::size_t i = 0; i < sol.y.size(); ++i)
        CHECK(sol.f[i] == doctest::Approx(p.f0(sol.y[i]) * std::exp(-lam * 2.0)).epsilon(1e-13));
}

TEST_CASE("constant forcing relaxes to F/D") {
    TransportProblem p;
    p.D = [](double, double) { return 2.0; };
    p.F = [](double, double) { return 3.0; };
    p.speed = [](double, double) { return 0.0; };
    p.f0 = [](double) { return 0.0; };
    p.y_max = 5.0;
    p.n = 51;
    p.ds = 0.05;
    const auto sol = integrate_transport(p, 4.0);
    CHECK(sol.f[25] == doctest::Approx(1.5 * (1.0 - std::exp(-8.0))).epsilon(1e-12));
}

TEST_CASE("transport along expanding characteristics") {
    // speed y/2: f(y, s) = f0(y e^{-s/2}); the midpoint foot is second order in ds
    TransportProblem p;
    p.D = [](double, double) { return 0.0; };
    p.F = [](double, double) { return 0.0; };
    p.speed = [](double y, double) { return 0.5 * y; };
    p.f0 = [](double y) { return std::exp(-y * y); };
    p.y_max = 10.0;
    p.n = 2001;
    p.ds = 0.01;
    const auto sol = integrate_transport(p, 2.0);
    for (std::size_t i = 0; i < sol.y.size(); i += 50)
        CHECK(std::abs(sol.f[i] - p.f0(sol.y[i] * std::exp(-1.0))) < 1e-5);

    // inflow at the left edge
    p.speed = [](double, double) { return 1.0; };
    CHECK_THROWS_AS(integrate_transport(p, 2.0), DomainError);
}

TEST_CASE("separable kernel term") {
    // f_s = K_out * int f K_in with f0 = 1, K_in normalized on [-5,5], K_out = c: f = e^{c s}
    TransportProblem p;
    const double c = 0.3;
    p.D = [](double, double) { return 0.0; };
    p.F = [](double, double) { return 0.0; };
    p.speed = [](double, double) { return 0.0; };
    p.K_out = [=](double, double) { return c; };
    p.K_in = [](double, double) { return 0.1; };
    p.f0 = [](double) { return 1.0; };
    p.y_max = 5.0;
    p.n = 101;
    p.ds = 1e-3;
    const auto sol = integrate_transport(p, 1.0);
    CHECK(sol.f[50] == doctest::Approx(std::exp(c)).epsilon(1e-6));
}

TEST_CASE("maximum principle draws") {
    const auto r = check_max_principle(7, 5);
    CHECK(r.admissible == 5);
    CHECK(r.counterexamples == 0);
    const auto again = check_max_principle(7, 5);
    REQUIRE(again.draws.size() == r.draws.size());
    for (std::size_t k = 0; k < r.draws.size(); ++k) CHECK(again.draws[k].sup_f == r.draws[k].sup_f);
    CHECK_THROWS_AS(check_max_principle(1, 0), UsageError);
}

TEST_CASE("far-field decay") {
    for (auto [lD, lF] : {std::pair{1.0, 0.5}, std::pair{0.5, 1.0}}) {
        const auto c = check_decay(lD, lF, 1.0);
        CHECK_MESSAGE(c.holds, "lambda_D " << lD << " lambda_F " << lF << ": " << c.f_edge << " vs " << c.bound);
        CHECK(c.bound > 0.0);
    }
    CHECK_THROWS_AS(check_decay(1.0, 1.0, 1.0), UsageError);
}
