#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dshock/diagnostics.hpp"
#include "dshock/errors.hpp"
#include "dshock/numerics.hpp"

using namespace dshock;

namespace {

std::vector<double> map(const std::vector<double>& x, double (*f)(double)) {
    std::vector<double> y;
    for (double v : x) y.push_back(f(v));
    return y;
}

}  // namespace

TEST_CASE("holder seminorm of simple functions") {
    const auto x = num::linspace(0.0, 1.0, 101);
    std::vector<double> c(x.size(), 3.0);
    CHECK(holder_seminorm(x, c, 0.5).value == 0.0);
    CHECK(holder_seminorm(x, x, 1.0).value == doctest::Approx(1.0).epsilon(1e-14));

    const auto xs = num::linspace(-1.0, 1.0, 2001);
    const auto u = map(xs, [](double v) { return std::cbrt(v); });
    const auto h = holder_seminorm(xs, u, 1.0 / 3.0);
    CHECK(h.value == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(0.01));
}

TEST_CASE("holder rejects bad input") {
    std::vector<double> x{0, 1, 1}, u{0, 1, 2};
    CHECK_THROWS_AS(holder_seminorm(x, u, 0.5), UsageError);
    std::vector<double> x2{0, 1, 2};
    CHECK_THROWS_AS(holder_seminorm(x2, u, 0.0), UsageError);
    CHECK_THROWS_AS(holder_seminorm(x2, u, 1.5), UsageError);
}

TEST_CASE("two-stage scan equals brute force") {
    std::vector<std::vector<double>> grids{num::linspace(-3.0, 3.0, 2000)};
    std::vector<double> clustered;
    for (int i = 0; i < 1999; ++i) {
        const double z = -1.0 + 2.0 * i / 1998.0;
        clustered.push_back(z * z * z * 4.0 + 0.01 * z);
    }
    grids.push_back(clustered);
    for (const auto& x : grids) {
        const std::vector<std::vector<double>> fields{
            map(x, [](double v) { return -std::tanh(3 * v); }),
            map(x, [](double v) { return std::cbrt(v) * std::exp(-v * v); }),
            map(x, [](double v) { return std::sin(5 * v) + 0.1 * v; }),
        };
        for (const auto& u : fields)
            for (double beta : {1.0 / 3.0, 0.5, 2.0 / 3.0, 1.0}) {
                const auto a = holder_seminorm(x, u, beta, HolderMethod::brute_force);
                const auto b = holder_seminorm(x, u, beta, HolderMethod::two_stage);
                CHECK(b.value == doctest::Approx(a.value).epsilon(1e-14));
                CHECK(b.method == HolderMethod::two_stage);
            }
    }
}

TEST_CASE("resolution guard") {
    HolderResult h;
    h.i = 10;
    h.j = 17;
    CHECK_FALSE(holder_resolved(h));
    h.j = 18;
    CHECK(holder_resolved(h));
    CHECK(holder_resolved(h, 8));
    CHECK_FALSE(holder_resolved(h, 9));
}

TEST_CASE("temporal fit recovers an exact power law") {
    const double t_star = 0.7, p = 0.25;
    std::vector<double> t, y;
    for (int k = 0; k < 60; ++k) {
        const double d = std::pow(10.0, -0.05 * k);
        t.push_back(t_star - d);
        y.push_back(std::pow(d, -p));
    }
    const auto f = fit_temporal_rate(t, y, t_star, 0.5);
    CHECK(f.status == RateStatus::fitted);
    CHECK(f.fit.exponent == doctest::Approx(-p).epsilon(1e-10));
    CHECK(f.expected == doctest::Approx(-0.25));
    CHECK(f.fit.points >= 8);

    std::vector<double> flat(t.size(), 2.0);
    const auto b = fit_temporal_rate(t, flat, t_star, 1.0 / 3.0);
    CHECK(b.status == RateStatus::bounded);
    CHECK(std::string(to_string(b.status)) == "bounded seminorm");
    CHECK(b.variation == doctest::Approx(1.0));

    CHECK_THROWS_AS(fit_temporal_rate(t, y, t[10], 0.5), UsageError);
    std::vector<double> t3(t.begin(), t.begin() + 5), y3(y.begin(), y.begin() + 5);
    CHECK_THROWS_AS(fit_temporal_rate(t3, y3, t_star, 0.5), InsufficientData);
}

namespace {

void local_form(double delta, double x_star, std::vector<double>& x, std::vector<double>& rho) {
    for (int i = -4000; i <= 4000; ++i) {
        const double r = std::copysign(std::pow(10.0, -14.0 + 14.0 * std::abs(i) / 4000.0), i);
        x.push_back(x_star + (i == 0 ? 0.0 : r));
        rho.push_back(1.0 + 1.0 / (delta + std::cbrt(r * r)));
    }
}

}  // namespace

TEST_CASE("spatial fit on the exact local form") {
    std::vector<double> x, rho;
    local_form(1e-6, 0.3, x, rho);
    const auto f = fit_spatial_profile(x, rho, 0.3);
    CHECK(f.slope.exponent == doctest::Approx(-2.0 / 3.0).epsilon(0.05));
    CHECK(f.delta == doctest::Approx(1e-6).epsilon(1e-6));
    CHECK(f.c == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(f.two_param_rms < 1e-5);

    // with the temporal term 1e-7 of the spatial one the slope is exact
    std::vector<double> x2, rho2;
    local_form(1e-12, 0.3, x2, rho2);
    SpatialFitOptions strict;
    strict.inner_factor = 1e7;
    const auto g = fit_spatial_profile(x2, rho2, 0.3, strict);
    CHECK(std::abs(g.slope.exponent + 2.0 / 3.0) < 1e-6);

    std::vector<double> x3{0, 1, 2}, r3{1, 1, 1};
    CHECK_THROWS_AS(fit_spatial_profile(x3, r3, 1.0), InsufficientData);
}

TEST_CASE("t_star from 1/max|u_x|") {
    const double t_star = 1.25;
    std::vector<double> t, ux;
    for (int k = 0; k < 40; ++k) {
        const double d = std::pow(10.0, -0.1 * k);
        t.push_back(t_star - d);
        ux.push_back(1.0 / d);
    }
    const auto e = estimate_tstar(t, ux);
    CHECK(e.t_star == doctest::Approx(t_star).epsilon(1e-12));
    CHECK(e.fit.exponent == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(e.fit.r2 == doctest::Approx(1.0));
    CHECK_FALSE(e.non_monotone_tail);
}
