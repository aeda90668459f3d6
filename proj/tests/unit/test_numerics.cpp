#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "dshock/errors.hpp"
#include "dshock/numerics.hpp"

using namespace dshock;

TEST_CASE("symmetric grid") {
    const auto g = Grid1D::symmetric(10.0, 21);
    CHECK(g.x(0) == -10.0);
    CHECK(g.x(10) == doctest::Approx(0.0));
    CHECK(g.x_end() == doctest::Approx(10.0));
    CHECK(g.nodes().size() == 21);
    Grid1D bad{0.0, 0.1, 20};
    CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("quadrature") {
    CHECK(num::integrate([](double x) { return std::exp(-x); }, 0.0, std::numeric_limits<double>::infinity(),
                         1e-12) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(num::integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cubic interpolation reproduces cubics") {
    std::vector<double> xs{0.0, 0.3, 0.7, 1.2, 2.0, 2.1, 3.5};
    std::vector<double> ys;
    auto f = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x * x; };
    for (double x : xs) ys.push_back(f(x));
    for (double xq : {0.0, 0.1, 0.95, 2.05, 3.0, 3.5}) CHECK(num::interp_cubic(xs, ys, xq) == doctest::Approx(f(xq)));
    CHECK(num::bracket(xs, 0.7) == 2);
    CHECK(num::bracket(xs, -1.0) == 0);
    CHECK(num::bracket(xs, 10.0) == xs.size() - 2);
}

TEST_CASE("tridiagonal solve") {
    std::vector<double> sub{0, -1, -1, -1}, diag{4, 4, 4, 4}, sup{-1, -1, -1, 0};
    std::vector<double> x{1.0, -2.0, 0.5, 3.0}, rhs(4);
    for (std::size_t i = 0; i < 4; ++i) {
        rhs[i] = diag[i] * x[i];
        if (i > 0) rhs[i] += sub[i] * x[i - 1];
        if (i < 3) rhs[i] += sup[i] * x[i + 1];
    }
    num::solve_tridiagonal(sub, diag, sup, rhs);
    for (std::size_t i = 0; i < 4; ++i) CHECK(rhs[i] == doctest::Approx(x[i]).epsilon(1e-14));
}

TEST_CASE("derivatives are exact on quartics") {
    auto f = [](double x) { return x * x * x * x - x; };
    auto df = [](double x) { return 4 * x * x * x - 1; };
    const auto xs = num::linspace(-1.0, 1.0, 41);
    std::vector<double> fs;
    for (double x : xs) fs.push_back(f(x));
    const auto d = num::diff_uniform(fs, xs[1] - xs[0]);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(d[i] == doctest::Approx(df(xs[i])).epsilon(1e-10));

    std::vector<double> xn, fn;
    for (int i = 0; i < 30; ++i) {
        const double x = -1.0 + 2.0 * std::pow(i / 29.0, 1.5);
        xn.push_back(x);
        fn.push_back(f(x));
    }
    const auto dn = num::diff_nonuniform(xn, fn);
    for (std::size_t i = 0; i < xn.size(); ++i) CHECK(dn[i] == doctest::Approx(df(xn[i])).epsilon(1e-9));
}

TEST_CASE("line fit") {
    std::vector<double> x{1, 2, 3, 4}, y{1.5, 3.5, 5.5, 7.5};
    const auto f = num::fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(-0.5));
    CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("symmetric logspace") {
    const auto v = num::symmetric_logspace(1e-3, 1e3, 7);
    CHECK(v.size() == 15);
    CHECK(v[7] == 0.0);
    CHECK(v.front() == doctest::Approx(-1e3));
    CHECK(v.back() == doctest::Approx(1e3));
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);
}
