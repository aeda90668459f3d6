#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

// Numerical certification of the profile inequalities and empirical checks
// of the transport-equation maximum principle and decay lemma. These are
// evidence on finite grids, not proofs.

namespace dshock {

struct InequalityReport {
    std::string name;
    double y_lo = 0.0, y_hi = 0.0;  // |y| range sampled
    std::size_t points = 0;
    double min_margin = 0.0;        // min over the grid of (rhs - lhs)
    double at_y = 0.0;
    double lambda_found = std::numeric_limits<double>::quiet_NaN();  // kernel inequalities only
    bool pass = false;
    std::string note;
};

inline constexpr double kInequalitySlack = 1e-9;
inline constexpr double kLambdaStep = 1e-3;

// Defaults: |y| in [1e-6, 1e4], 10^5 log-spaced points (mirrored, plus 0).
std::vector<InequalityReport> check_profile_inequalities(double y_max = 1e4, std::size_t n = 100000);

// Individual sides, exposed for tests.
double slope_lower_bound(double y);          // -1 / (1 + 3y^2 / (3y^2+1)^{2/3})
double damping_margin(double y);             // rhs - lhs of the damping lower bound
double uyy_kernel_lhs(double y);             // |U''| (1+y^2)/y^2 int_0^|y| y'^2/(1+y'^2), at lambda = 1
double uyy_kernel_rhs(double y);             // 3y^2/(1+8y^2) + y^2/(30(1+y^2))
double far_kernel_lhs(double y);             // |U''| (|y|^{2/3}+8) int_0^|y| 1/(y'^{2/3}+8), at lambda = 1
double far_kernel_rhs(double y);

// f_s + D f + S f_y = F + int f(y') K(y, y') dy' on a uniform y window, with
// a separable kernel K(y, s; y') = K_out(y, s) K_in(y', s).
struct TransportProblem {
    std::function<double(double, double)> D;      // (y, s)
    std::function<double(double, double)> F;      // (y, s)
    std::function<double(double, double)> speed;  // (y, s)
    std::function<double(double, double)> K_out;  // (y, s); empty for no kernel
    std::function<double(double, double)> K_in;   // (y', s)
    std::function<double(double)> f0;
    double s0 = 0.0;
    double y_max = 50.0;
    std::size_t n = 2001;
    double ds = 1e-3;
};

struct TransportSolution {
    std::vector<double> y, f;
    double s_end = 0.0;
    std::vector<double> s_hist, sup_hist;  // sup |f| after each step
    std::vector<double> sup_omega_hist;    // sup |f| over |y| <= omega_radius
};

// Semi-Lagrangian steps along the characteristics of speed with an
// exponential integrator for the damping. The nonlocal term uses the previous
// profile and is refined by one fixed-point sweep per step. Throws
// DomainError when a characteristic foot leaves the window.
TransportSolution integrate_transport(const TransportProblem& p, double s_end, double omega_radius = 0.0);

struct MaxPrincipleDraw {
    std::uint64_t index = 0;
    double m0 = 0.0, lambda_D = 0.0, delta = 0.0, F0 = 0.0;
    double sup_f = 0.0;
    double sup_omega = 0.0;
    bool admissible = false;  // sup over the compact set stayed <= m0
    bool holds = false;       // sup_f <= 2 m0
};

struct MaxPrincipleReport {
    std::vector<MaxPrincipleDraw> draws;
    std::size_t admissible = 0;
    std::size_t counterexamples = 0;
};

// Random admissible coefficient sets for the L-infinity bound 2 m0.
MaxPrincipleReport check_max_principle(std::uint64_t seed, std::size_t draws, double s_span = 2.0);

struct DecayCheck {
    double lambda_D = 0.0, lambda_F = 0.0, F0 = 0.0;
    double y_edge = 0.0;
    double f_edge = 0.0;  // |f| at the largest resolved |y|
    double bound = 0.0;
    bool holds = false;
};

// Far-field decay bound, evaluated at the window edge with the initial limsup
// replaced by the supremum of |f0| beyond the characteristic foot.
DecayCheck check_decay(double lambda_D, double lambda_F, double F0, double s_span = 2.0);

}  // namespace dshock
