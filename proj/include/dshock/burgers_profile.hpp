#pragma once

#include <span>
#include <vector>

// Stable self-similar Burgers profile: the real root of U^3 + U + y = 0.

namespace dshock {

struct ProfileSample {
    double y = 0.0;
    double u_bar = 0.0;
    double d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0;
};

double eval_profile(double y);
// Reference root by 80 bisection steps on [-|y|-2, |y|+2].
double eval_profile_bisection(double y);
double eval_derivative(double y, int order);
ProfileSample sample_profile(double y);

// Derivatives from a known root value (no re-solve).
ProfileSample profile_from_root(double y, double u_bar);

// Ubar(y)/y with the removable singularity at 0 filled by its series.
double profile_over_y(double y);

struct AsymptoticsPoint {
    double y;
    double value_dev;  // |y^{-1/3} Ubar + 1|
    double slope_dev;  // ||y^{2/3} Ubar'| - 1/3|
};

struct AsymptoticsReport {
    std::vector<AsymptoticsPoint> points;  // origin excluded
    double max_value_dev = 0.0;
    double max_slope_dev = 0.0;
    std::size_t excluded_origin = 0;
    bool has_far_field = false;  // some |y| >= 1e3 present
    bool decreasing = true;      // deviations non-increasing in |y|
};

AsymptoticsReport check_asymptotics(std::span<const double> ys);

}  // namespace dshock
