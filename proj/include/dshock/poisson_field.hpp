#pragma once

#include <limits>
#include <span>
#include <vector>

#include "dshock/fluid_state.hpp"
#include "dshock/numerics.hpp"

// Boltzmann-Poisson field equation -phi_xx = rho - e^phi on a truncated line
// with phi = 0 at both ends.

namespace dshock {

struct FieldSolution {
    Grid1D grid;                 // set for uniform-grid solves
    std::vector<double> x;       // nodes
    std::vector<double> phi, phi_x, phi_xx;
    int iterations = 0;
    double residual = 0.0;       // max |-phi_xx - rho + e^phi| of the discrete equation
    double contraction = std::numeric_limits<double>::quiet_NaN();  // Green's iteration only
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 100;
    int max_halvings = 50;
};

FieldSolution solve_newton(const Grid1D& grid, std::span<const double> rho, const NewtonOptions& opt = {});

// Finite-volume form on strictly increasing nodes x with cell masses m_i:
//   -(phi_{i+1}-phi_i)/dx_{i+1/2} + (phi_i-phi_{i-1})/dx_{i-1/2} = m_i - h_i e^{phi_i}
// with h_i the dual cell length and phi fixed to 0 at the two end nodes.
// Stops when the Newton update falls below tol. phi_guess may be empty.
struct NodeField {
    std::vector<double> phi;
    std::vector<double> phi_x;  // three-point parabola slope at each node
    std::vector<double> cell;   // h_i
    int iterations = 0;
    double residual = 0.0;      // max over interior of |row_i| / h_i
};
NodeField solve_newton_nodes(std::span<const double> x, std::span<const double> mass,
                             std::span<const double> phi_guess, const NewtonOptions& opt = {});

enum class KernelQuadrature {
    discrete,    // Green's function of the same three-point operator (1 - D_h^2)
    exact_cell,  // 0.5 e^{-|y-y'|} integrated exactly against piecewise-linear data
};

struct GreensOptions {
    double tol = 1e-12;
    int max_iter = 500;
    KernelQuadrature quadrature = KernelQuadrature::discrete;
};

// Fixed point of Phi <- K * (f - (e^Phi - 1 - Phi)), K = (1 - d_yy)^{-1}.
FieldSolution solve_greens_iteration(const Grid1D& grid, std::span<const double> f, const GreensOptions& opt = {});

// Contraction constant bounding the Lipschitz ratio of e^Phi - Phi on |Phi| <= 1/4.
double contraction_bound_c1();

struct SmallnessCheck {
    double C_f = 0.0;       // sup |y|^{2/3} |f|
    double sup_I = 0.0;
    double cond1 = 0.0;     // C_f sup I, needs <= 1/4
    double cond2 = 0.0;     // e^{1/4} C_f (sup I)^2, needs <= 2
    bool satisfied = false;
};
SmallnessCheck greens_smallness(const Grid1D& grid, std::span<const double> f, double sup_I);

struct WeightedBounds {
    double C_f = 0.0;
    double sup_I = 0.0;
    double weighted_sup[3] = {0.0, 0.0, 0.0};  // sup (|y|^{2/3}+1)|d^n Phi|, n = 0,1,2
    bool holds_stated = false;  // all <= C_f
    bool holds_proved = false;  // all <= C_f sup I
};
WeightedBounds weighted_bounds(const FieldSolution& sol, std::span<const double> f, double sup_I);

struct EnergyBreakdown {
    double kinetic = 0.0;
    double field = 0.0;
    double electron = 0.0;
    double total = 0.0;
};

// Trapezoidal quadrature on the state's sample points. The field term uses
// the exact integral of the piecewise-linear interpolant of phi.
EnergyBreakdown energy(const FluidState& state);

// Integrand of the electron energy, (phi-1)e^phi + 1, without cancellation.
double electron_density_energy(double phi);

// V(z) = |int_0^z sqrt(2((t-1)e^t + 1)) dt|.
double potential_V(double z);

struct PotentialBounds {
    double H0 = 0.0;
    double z_plus = 0.0;    // V_+^{-1}(H0)
    double z_minus = 0.0;   // -V_-^{-1}(H0) <= 0
    double M1 = 0.0;        // max(z_plus, -z_minus)
    double m1 = 1.0;        // exp(-M1)
    double m2 = 1.0;        // exp(M1)
};
PotentialBounds potential_bounds(double H0);

struct PotentialBoundsReport {
    PotentialBounds bounds;
    double phi_sup = 0.0;
    double phi_x_sup = 0.0;  // measured, not certified
    bool within = false;
};
PotentialBoundsReport potential_bounds_check(const FluidState& state, double H0);

// Paper-side check of the field energy against the density L2 defect:
// int phi_x^2 + (phi-1)e^phi + 1 <= int (rho-1)^2 (theta = 1 for rho > 0).
struct FieldEnergyL2 {
    double lhs = 0.0;
    double rhs = 0.0;
};
FieldEnergyL2 field_energy_vs_l2(const FluidState& state);

}  // namespace dshock
