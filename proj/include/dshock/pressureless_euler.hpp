#pragma once

#include <span>
#include <string>
#include <vector>

#include "dshock/initdata.hpp"

// Pressureless Euler n_t + (nv)_x = 0, v_t + v v_x = 0 solved exactly by
// characteristics: x = a + (t - t0) v0(a), n = n0(a) / (1 + (t - t0) v0'(a)).

namespace dshock {

struct PEInitialData {
    Profile n0, v0, dv0, d2v0, d3v0;
    double t0 = -1.0;
    std::string name;
};

PEInitialData pe_gauss();    // v0 = -x exp(-x^2)
PEInitialData pe_sech();     // v0 = -sech(2x) tanh(2x)
PEInitialData pe_profile();  // v0 = Ubar
PEInitialData pe_preset(const std::string& name);  // gauss | sech | profile

// Lagrangian initial data in the form the Euler-Poisson solver consumes.
InitialData to_initial_data(const PEInitialData& d);

struct PEState {
    double t = 0.0;
    std::vector<double> alpha, x, v, n, w;
};

PEState exact_state(const PEInitialData& d, double t, std::span<const double> alphas);

struct Lifespan {
    bool blows_up = false;
    double elapsed = 0.0;     // 1 / |inf v0'|
    double t_star = 0.0;      // t0 + elapsed
    double alpha_star = 0.0;  // argmin of v0'
    double x_star = 0.0;      // alpha_star + elapsed v0(alpha_star)
    double min_dv0 = 0.0;
};

// Dense scan on [a,b] then golden-section refinement of the minimum of v0'.
Lifespan lifespan(const PEInitialData& d, double a = -10.0, double b = 10.0);

// Solve x = a + (t - t0) v0(a) for a; requires t before the lifespan.
double invert_characteristic(const PEInitialData& d, double t, double x, double a_lo, double a_hi);

struct SelfSimSlice {
    double s = 0.0;
    double max_dev_from_profile = 0.0;  // sup |V(y,s) - Ubar(y)|
    double weighted_slope_dev = 0.0;    // sup (|y|^{2/3}+1) |V_y - Ubar'|
    double N_weighted_min = 0.0;        // inf (|y|^{2/3}+1) N
    double N_weighted_max = 0.0;        // sup (|y|^{2/3}+1) N
};

struct SelfSimReport {
    std::vector<SelfSimSlice> slices;
    double max_dev = 0.0;       // over all s
    double drift = 0.0;         // sup_s sup_y |V(y,s) - V(y,s_first)|
    double N_lower = 0.0, N_upper = 0.0;
};

// Transforms the exact solution to y = x (-t)^{-3/2}, s = -log(-t),
// V = e^{s/2} v, N = e^{-s} n. Requires t0 = -1, v0(0) = 0, v0'(0) = -1 as
// the global minimum of v0', v0''(0) = 0.
SelfSimReport selfsim_check(const PEInitialData& d, std::span<const double> s_values, std::span<const double> ys);

}  // namespace dshock
