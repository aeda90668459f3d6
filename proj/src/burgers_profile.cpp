#include "dshock/burgers_profile.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dshock/errors.hpp"

namespace dshock {

namespace {

constexpr double kBisectionBelow = 1e-4;

double cardano(double y) {
    // Real root of U^3 + U + y = 0 as a - 1/(3a), with a the larger-magnitude
    // cube root so that neither term cancels.
    const double d = std::sqrt(0.25 * y * y + 1.0 / 27.0);
    const double a = std::cbrt(-0.5 * y - std::copysign(d, y));
    double u = a - 1.0 / (3.0 * a);
    u -= (u * u * u + u + y) / (3.0 * u * u + 1.0);
    return u;
}

}  // namespace

double eval_profile_bisection(double y) {
    if (!std::isfinite(y)) throw DomainError("eval_profile: non-finite y");
    double lo = -std::abs(y) - 2.0, hi = std::abs(y) + 2.0;
    for (int k = 0; k < 80; ++k) {
        double mid = 0.5 * (lo + hi);
        if (mid * mid * mid + mid + y > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

double eval_profile(double y) {
    if (!std::isfinite(y)) throw DomainError("eval_profile: non-finite y");
    if (y == 0.0) return 0.0;
    if (std::abs(y) < kBisectionBelow) return eval_profile_bisection(y);
    return cardano(y);
}

ProfileSample profile_from_root(double y, double u) {
    ProfileSample p;
    p.y = y;
    p.u_bar = u;
    p.d1 = -1.0 / (1.0 + 3.0 * u * u);
    const double d1 = p.d1;
    p.d2 = 6.0 * u * d1 * d1 * d1;
    p.d3 = 6.0 * d1 * d1 * d1 * d1 + 18.0 * u * d1 * d1 * p.d2;
    p.d4 = 42.0 * d1 * d1 * d1 * p.d2 + 36.0 * u * d1 * p.d2 * p.d2 + 18.0 * u * d1 * d1 * p.d3;
    return p;
}

ProfileSample sample_profile(double y) { return profile_from_root(y, eval_profile(y)); }

double eval_derivative(double y, int order) {
    if (order < 1 || order > 4) throw UsageError("eval_derivative: order must be in 1..4");
    ProfileSample p = sample_profile(y);
    switch (order) {
        case 1: return p.d1;
        case 2: return p.d2;
        case 3: return p.d3;
        default: return p.d4;
    }
}

double profile_over_y(double y) {
    if (std::abs(y) < 1e-3) {
        const double y2 = y * y;
        return -1.0 + y2 * (1.0 + y2 * (-3.0 + y2 * (12.0 - 55.0 * y2)));
    }
    return eval_profile(y) / y;
}

AsymptoticsReport check_asymptotics(std::span<const double> ys) {
    AsymptoticsReport r;
    for (double y : ys) {
        if (y == 0.0) {
            ++r.excluded_origin;
            continue;
        }
        ProfileSample p = sample_profile(y);
        AsymptoticsPoint q{y, std::abs(p.u_bar / std::cbrt(y) + 1.0),
                           std::abs(std::abs(std::cbrt(y * y) * p.d1) - 1.0 / 3.0)};
        r.max_value_dev = std::max(r.max_value_dev, q.value_dev);
        r.max_slope_dev = std::max(r.max_slope_dev, q.slope_dev);
        if (std::abs(y) >= 1e3) r.has_far_field = true;
        r.points.push_back(q);
    }
    // Monotone decay of both deviations in |y| (ties in |y| grouped).
    std::map<double, std::pair<double, double>> by_abs;
    for (const auto& q : r.points) {
        auto& slot = by_abs[std::abs(q.y)];
        slot.first = std::max(slot.first, q.value_dev);
        slot.second = std::max(slot.second, q.slope_dev);
    }
    double pv = INFINITY, ps = INFINITY;
    for (const auto& [ay, dev] : by_abs) {
        (void)ay;
        if (dev.first > pv * (1.0 + 1e-9) + 1e-15 || dev.second > ps * (1.0 + 1e-9) + 1e-15) r.decreasing = false;
        pv = dev.first;
        ps = dev.second;
    }
    return r;
}

}  // namespace dshock
