#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace dshock {

enum class Provenance { canonical, figure1, custom };
const char* to_string(Provenance p);

using Profile = std::function<double(double)>;

struct InitialData {
    // rho[k] = d^k rho0/dx^k for k = 0..2, u[k] = d^k u0/dx^k for k = 0..4.
    std::array<Profile, 3> rho;
    std::array<Profile, 5> u;
    double eps = 0.0;
    double t0 = 0.0;  // initial time; -eps for canonical data
    Provenance provenance = Provenance::custom;
};

// rho0 = 1, u0(x) = eps^{1/2} Ubar(x eps^{-3/2}), starting at t0 = -eps.
InitialData canonical_data(double eps);
// rho0 = 1, u0 = -sech(2x) tanh(2x), t0 = 0.
InitialData figure1_data();
// Cubic interpolation of samples; derivatives by repeated 5-point
// differences on the sample nodes.
InitialData custom_from_samples(std::span<const double> x, std::span<const double> rho0,
                                std::span<const double> u0, double eps);

// I(y) = (|y|^{2/3}+1) int e^{-|y-y'|} |y'|^{-2/3} dy'.
double I_weight(double y, double quad_tol = 1e-12);

struct AConstant {
    double A = 0.0;
    double sup_I = 0.0;
    double argmax_y = 0.0;
};
AConstant compute_A(double quad_tol);

struct ConditionResult {
    std::string name;
    bool pass = false;
    double margin = 0.0;
    double at_x = 0.0;  // where the margin is attained
    bool surrogate = false;
    std::string note;
};

struct AdmissibilityReport {
    std::vector<ConditionResult> conditions;
    double A_value = 0.0;
    double sup_I = 0.0;
    bool all_pass() const;
    const ConditionResult& get(const std::string& name) const;
};

// Dense-grid check of the localization and derivative conditions on [a,b].
AdmissibilityReport validate(const InitialData& data, double eps, double a, double b, const AConstant& A,
                             std::size_t n = 200001);

}  // namespace dshock
