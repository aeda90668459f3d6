#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dshock/burgers_profile.hpp"
#include "dshock/errors.hpp"
#include "dshock/initdata.hpp"
#include "dshock/numerics.hpp"

using namespace dshock;

namespace {

// (|y|^{2/3}+1) int e^{-|y-y'|} |y'|^{-2/3} dy' with y' = v^3, split at the kink
double I_oracle(double y) {
    const double c = std::cbrt(y), inf = std::numeric_limits<double>::infinity();
    auto g = [y](double v) { return 3.0 * std::exp(-std::abs(y - v * v * v)); };
    double J = num::integrate([&](double v) { return g(c - v); }, 0.0, inf, 1e-13) +
               num::integrate([&](double v) { return g(c + v); }, 0.0, inf, 1e-13);
    return (std::cbrt(y * y) + 1.0) * J;
}

}  // namespace

TEST_CASE("canonical data") {
    const double eps = 0.05;
    const auto d = canonical_data(eps);
    CHECK(d.t0 == -eps);
    CHECK(d.u[0](0.0) == 0.0);
    CHECK(d.u[1](0.0) == doctest::Approx(-1.0 / eps));
    CHECK(d.rho[0](0.3) == 1.0);
    for (double x : {-1.0, -0.01, 0.002, 0.3, 4.0})
        CHECK(std::abs(eps * d.u[1](x) - eval_derivative(x * std::pow(eps, -1.5), 1)) < 1e-14);
    // higher derivatives by differencing the lower ones
    const double h = 1e-6;
    for (int k = 1; k <= 4; ++k)
        for (double x : {-0.02, 0.004, 0.03}) {
            const double fd = (d.u[k - 1](x + h) - d.u[k - 1](x - h)) / (2 * h);
            CHECK(d.u[k](x) == doctest::Approx(fd).epsilon(1e-5));
        }
    CHECK_THROWS_AS(canonical_data(-0.1), UsageError);
    CHECK_THROWS_AS(canonical_data(0.5), UsageError);
}

TEST_CASE("figure-1 data") {
    const auto d = figure1_data();
    CHECK(d.u[0](0.0) == 0.0);
    CHECK(d.u[1](0.0) == doctest::Approx(-2.0));
    double mn = 1e9;
    for (double x = -10; x <= 10; x += 1e-3) mn = std::min(mn, d.u[1](x));
    CHECK(mn == doctest::Approx(-2.0).epsilon(1e-12));
    const double h = 1e-5;
    for (int k = 1; k <= 4; ++k)
        for (double x : {-0.7, 0.1, 1.3}) {
            const double fd = (d.u[k - 1](x + h) - d.u[k - 1](x - h)) / (2 * h);
            CHECK(d.u[k](x) == doctest::Approx(fd).epsilon(1e-7));
        }
}

TEST_CASE("custom data from samples") {
    const auto x = num::linspace(-5.0, 5.0, 2001);
    std::vector<double> r, u;
    for (double v : x) {
        r.push_back(1.0 + 0.1 * std::exp(-v * v));
        u.push_back(std::sin(v));
    }
    const auto d = custom_from_samples(x, r, u, 0.1);
    CHECK(d.u[0](0.4) == doctest::Approx(std::sin(0.4)).epsilon(1e-10));
    CHECK(d.u[1](0.4) == doctest::Approx(std::cos(0.4)).epsilon(1e-8));
    CHECK(d.rho[1](0.4) == doctest::Approx(-0.2 * 0.4 * std::exp(-0.16)).epsilon(1e-7));
    r[5] = -1.0;
    CHECK_THROWS_AS(custom_from_samples(x, r, u, 0.1), DomainError);
}

TEST_CASE("weight integral") {
    CHECK(I_weight(0.0) == doctest::Approx(2.0 * std::tgamma(1.0 / 3.0)).epsilon(1e-13));
    for (double y : {1e-4, 0.3, 1.0, 2.5, 17.0, 120.0, -3.0}) {
        CHECK(I_weight(y) > 0.0);
        CHECK(I_weight(y) == doctest::Approx(I_oracle(std::abs(y))).epsilon(1e-9));
    }
    CHECK(I_weight(-2.0) == I_weight(2.0));
    // (|y|^{2/3}+1) 2 |y|^{-2/3} -> 2
    CHECK(I_weight(1e6) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("constant A") {
    const auto A = compute_A(1e-10);
    CHECK(A.A == std::min(1.0 / (8.0 * A.sup_I), std::exp(-0.25) / (A.sup_I * A.sup_I)));
    CHECK(A.sup_I == doctest::Approx(I_weight(A.argmax_y)).epsilon(1e-12));
    CHECK(I_weight(A.argmax_y * 0.9) < A.sup_I);
    CHECK(I_weight(A.argmax_y * 1.1) < A.sup_I);
    CHECK(A.argmax_y > 0.0);
    CHECK(A.argmax_y < 1e3);
    // regression against the value recorded when the module was written
    CHECK(A.A == doctest::Approx(0.016585303).epsilon(1e-7));
    CHECK_THROWS_AS(compute_A(0.1), UsageError);
}

TEST_CASE("admissibility of canonical data") {
    const auto A = compute_A(1e-10);
    const auto r = validate(canonical_data(0.05), 0.05, -20.0, 20.0, A);
    for (const auto* name : {"center_u0", "center_du0", "center_d2u0", "center_d3u0", "bound_du0", "bound_d2u0",
                             "bound_d3u0", "slope_localization", "density_localization", "density_positive"})
        CHECK_MESSAGE(r.get(name).pass, name);
    // sup |Ubar''''| is about 29.8, above the bound 1
    CHECK_FALSE(r.get("bound_d4u0").pass);
    CHECK(r.get("bound_d4u0").margin < 0.0);
    CHECK_FALSE(r.all_pass());
    CHECK(r.A_value == A.A);
    CHECK_THROWS_AS(r.get("no_such_condition"), UsageError);
}

TEST_CASE("a large density bump violates density localization") {
    auto d = canonical_data(0.05);
    d.rho[0] = [](double x) { return 1.0 + 5.0 * std::exp(-x * x); };
    d.rho[1] = [](double x) { return -10.0 * x * std::exp(-x * x); };
    d.rho[2] = [](double x) { return (20.0 * x * x - 10.0) * std::exp(-x * x); };
    const auto r = validate(d, 0.05, -20.0, 20.0, compute_A(1e-10), 20001);
    CHECK_FALSE(r.get("density_localization").pass);
    CHECK(r.get("density_localization").margin < 0.0);
}

TEST_CASE("figure-1 data read with eps = 1/2") {
    const auto r = validate(figure1_data(), 0.5, -10.0, 10.0, compute_A(1e-10), 20001);
    CHECK(r.get("center_u0").pass);
    CHECK(r.get("center_du0").pass);
    CHECK(r.get("density_localization").pass);
    CHECK_FALSE(r.all_pass());
}
