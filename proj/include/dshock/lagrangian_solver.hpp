#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "dshock/fluid_state.hpp"
#include "dshock/initdata.hpp"
#include "dshock/poisson_field.hpp"

// Euler-Poisson along characteristics. Particles carry x, u and the Jacobian
// hierarchy w1 = x_a, w2 = x_aa, w3 = x_aaa together with their time
// derivatives. The field is solved on the particle positions themselves:
// each particle is a finite-volume node holding mass m_i, so the force is the
// exact gradient of the discrete field energy and the semi-discrete
// Hamiltonian is conserved.

namespace dshock {

// alpha = center + zeta - (1 - r) ell tanh(zeta / ell), zeta uniform.
// r = 1 gives uniform labels; r < 1 concentrates labels near center.
struct LabelMap {
    double r = 1.0;
    double ell = 5.0;
    double center = 0.0;
    double alpha(double zeta) const;
    double zeta(double alpha) const;  // inverse by bisection
};

struct ParticleEnsemble {
    double t = 0.0;
    std::vector<double> alpha, x, u, w, w_dot;
    std::vector<double> w2, w2_dot, w3, w3_dot;
    std::vector<double> rho0, rho0_d1, rho0_d2;
    std::vector<double> mass;
    std::vector<double> phi, phi_x;  // field at particles from the latest solve

    std::size_t size() const { return x.size(); }
};

ParticleEnsemble init_particles(const InitialData& data, double a, double b, std::size_t n,
                                const LabelMap& map = {});

// Quantities derived from a particle state at a single stage.
struct LocalFields {
    double u = 0, ux = 0, uxx = 0, uxxx = 0;
    double rho = 0, rho_x = 0;
    double phi = 0, phi_x = 0, phi_xx = 0, phi_xxx = 0;
};

class StageView {
public:
    StageView(const ParticleEnsemble& base, double t, std::span<const double> y, std::span<const double> phi,
              std::span<const double> phi_x, bool field);
    double t() const { return t_; }
    std::size_t size() const { return n_; }
    std::span<const double> x() const { return x_; }
    LocalFields at_particle(std::size_t i) const;
    // Cubic interpolation of the particle-wise LocalFields to position xq.
    LocalFields at(double xq) const;

private:
    const ParticleEnsemble& base_;
    double t_;
    std::size_t n_;
    std::span<const double> x_, u_, w1_, w1d_, w2_, w2d_, w3_, w3d_;
    std::span<const double> phi_, phi_x_;
    bool field_;
};

// Extra ODE integrated inside the fluid RK4 stages (the modulation system).
class CoupledOde {
public:
    virtual ~CoupledOde() = default;
    virtual std::size_t dim() const = 0;
    virtual void initial(std::span<double> y) const = 0;
    virtual void rhs(const StageView& stage, std::span<const double> y, std::span<double> dydt) = 0;
    // Called with the initial state and after each accepted step; returning false
    // stops the run (normal termination, e.g. tau - t <= 0).
    virtual bool accept(const StageView& stage, std::span<const double> y) = 0;
};

struct SolverOptions {
    bool field = true;           // false: pressureless (no forcing)
    // When finite, e^phi is frozen at this value (no force, w'' = rho0 - m w).
    double frozen_field = std::numeric_limits<double>::quiet_NaN();
    double newton_tol = 1e-13;   // on the Newton update
    double dt_max = 1e-2;
    double c_cfl = 0.07;
    double w_stop = 1e-3;
    double t_max = 10.0;
    std::size_t max_steps = 200000;
};

struct StepInfo {
    double t = 0.0;
    double dt = 0.0;
    double min_w = 1.0;
    std::size_t argmin = 0;
    double max_ux = 0.0;         // max |w_dot / w|
    EnergyBreakdown energy;      // discrete Hamiltonian
    double mass = 0.0;           // sum m_i (constant by construction)
    double phi_sup = 0.0;
    double phi_x_sup = 0.0;
    double rho_w_defect = 0.0;   // max |rho w - rho0| with rho = rho0 / w
    double spacing_defect = 0.0; // max |(x_{i+1}-x_{i-1})/(a_{i+1}-a_{i-1}) - w_i| / w_i
    int newton_iterations = 0;
};

struct BlowupEvent {
    double t_star = std::numeric_limits<double>::quiet_NaN();
    double x_star = std::numeric_limits<double>::quiet_NaN();
    double alpha_star = std::numeric_limits<double>::quiet_NaN();
    double min_w_at_stop = 1.0;
    double fit_r2 = 0.0;
    bool detected = false;
    bool timed_out = false;
    bool stopped_by_coupled = false;
};

struct RunResult {
    std::vector<StepInfo> records;
    BlowupEvent event;
};

class LagrangianSolver {
public:
    LagrangianSolver(ParticleEnsemble ens, SolverOptions opt, CoupledOde* coupled = nullptr);

    const ParticleEnsemble& ensemble() const { return ens_; }
    std::span<const double> coupled_state() const { return ode_state_; }
    const SolverOptions& options() const { return opt_; }

    // Solves the field for the current state and fills phi, phi_x.
    void refresh_field();
    // One RK4 step of the coupled system.
    void step(double dt);
    StepInfo info() const;
    // Valid until the next call to view() or step().
    StageView view() const;

    // Adaptive stepping until min w <= w_stop, t >= t_max, or the coupled
    // ODE requests a stop. on_step runs after every accepted step.
    RunResult run_until_blowup(const std::function<void(const LagrangianSolver&, const StepInfo&)>& on_step = {});

    double suggested_dt() const;

private:
    void pack(std::vector<double>& y) const;
    void unpack(std::span<const double> y);
    void rhs(double t, std::span<const double> y, std::span<double> dy, std::vector<double>& phi_guess,
             std::vector<double>& phi_x_out);

    ParticleEnsemble ens_;
    SolverOptions opt_;
    CoupledOde* coupled_;
    std::vector<double> ode_state_;
    mutable std::vector<double> view_buf_;
    int last_newton_iterations_ = 0;
};

// Samples at particle positions with rho = rho0 / w.
FluidState to_fluid_state(const ParticleEnsemble& ens);

// Cumulative label integral of f with f_alpha known at the nodes (two-point
// Hermite rule), pinned to value at index anchor. With (w, w2) it rebuilds
// x(alpha) and with (w_dot, w2_dot) u(alpha) from the carried hierarchy. The
// particle positions themselves differ from these by O(dx^2) alpha, which
// dominates the fold once w is of that size.
std::vector<double> integrate_labels(std::span<const double> alpha, std::span<const double> f,
                                     std::span<const double> f_alpha, std::size_t anchor, double value);

// Discrete Hamiltonian: sum m u^2/2 + field and electron energy of the
// node solution.
EnergyBreakdown discrete_energy(const ParticleEnsemble& ens);

// Constant-field oracle: w'' + m w = b, w(0) = 1, w'(0) = wd0.
double constant_field_w(double t, double m, double b, double wd0);

struct CriterionResult {
    std::optional<double> A1_witness;
    std::optional<double> A2_witness;
    std::optional<double> low_density_witness;  // 2 rho0 <= m1
    double A2_margin = -std::numeric_limits<double>::infinity();  // max over alpha of (-sqrt(2rho0-m1) - du0)
};

CriterionResult blowup_criterion(const Profile& rho0, const Profile& du0, double m1, double m2,
                                 std::span<const double> alphas);

}  // namespace dshock
