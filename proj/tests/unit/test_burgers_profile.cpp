#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dshock/burgers_profile.hpp"

using namespace dshock;

TEST_CASE("profile values at reference points") {
    CHECK(eval_profile(0.0) == 0.0);
    CHECK(eval_profile(2.0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(eval_profile(-2.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(eval_profile(10.0) - eval_profile_bisection(10.0)) < 1e-12);
}

TEST_CASE("profile solves the cubic and is odd") {
    for (double y : {-1e4, -37.5, -3.0, -0.1, 1e-9, 0.7, 5.0, 1e3, 1e6}) {
        const double u = eval_profile(y);
        CHECK(std::abs(y + u + u * u * u) <= 1e-12 * std::max(1.0, std::abs(y)));
        CHECK(eval_profile(-y) == -u);
        CHECK(std::signbit(u) != std::signbit(y));
    }
}

TEST_CASE("derivatives at the origin") {
    CHECK(eval_derivative(0.0, 1) == doctest::Approx(-1.0));
    CHECK(std::abs(eval_derivative(0.0, 2)) < 1e-14);
    CHECK(eval_derivative(0.0, 3) == doctest::Approx(6.0));
    CHECK(std::abs(eval_derivative(0.0, 4)) < 1e-14);
    CHECK(eval_derivative(2.0, 1) == doctest::Approx(-0.25).epsilon(1e-14));
}

TEST_CASE("first derivative matches -1/(1+3U^2) and lies in [-1,0]") {
    for (double y = -50.0; y <= 50.0; y += 0.37) {
        const auto p = sample_profile(y);
        CHECK(p.d1 == -1.0 / (1.0 + 3.0 * p.u_bar * p.u_bar));
        CHECK(p.d1 >= -1.0);
        CHECK(p.d1 <= 0.0);
    }
}

TEST_CASE("derivatives agree with finite differences") {
    const double h = 1e-3;
    for (double y : {-2.5, -0.4, 0.3, 1.7, 6.0}) {
        for (int k = 1; k <= 4; ++k) {
            auto f = [&](double z) { return k == 1 ? eval_profile(z) : eval_derivative(z, k - 1); };
            const double fd = (f(y - 2 * h) - 8 * f(y - h) + 8 * f(y + h) - f(y + 2 * h)) / (12 * h);
            CHECK(eval_derivative(y, k) == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
        }
    }
}

TEST_CASE("profile_over_y is continuous at 0") {
    CHECK(profile_over_y(0.0) == doctest::Approx(-1.0));
    CHECK(profile_over_y(1e-7) == doctest::Approx(eval_profile(1e-7) / 1e-7).epsilon(1e-10));
    CHECK(profile_over_y(0.5) == doctest::Approx(eval_profile(0.5) / 0.5).epsilon(1e-14));
}

TEST_CASE("asymptotics report") {
    const std::vector<double> ys{-1e6, -1e3, 0.0, 1e3, 1e6};
    const auto r = check_asymptotics(ys);
    CHECK(r.excluded_origin == 1);
    CHECK(r.points.size() == 4);
    CHECK(r.has_far_field);
    for (const auto& p : r.points)
        if (std::abs(p.y) >= 1e6) {
            CHECK(p.value_dev < 1e-3);
            CHECK(p.slope_dev < 1e-3);
        }
}
