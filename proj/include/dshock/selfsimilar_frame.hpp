#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "dshock/fluid_state.hpp"
#include "dshock/lagrangian_solver.hpp"

// Modulated self-similar variables
//   y = (x - xi) (tau - t)^{-3/2},  s = -log(tau - t),
//   rho - 1 = e^s P,  u = e^{-s/2} U + kappa,  phi = Phi,
// with (tau, kappa, xi) driven by the modulation ODEs so that U(0) = 0,
// U_y(0) = -1, U_yy(0) = 0 are preserved.

namespace dshock {

struct ModulationState {
    double t = 0.0;
    double tau = 0.0, kappa = 0.0, xi = 0.0;
    double tau_dot = 0.0, kappa_dot = 0.0, xi_dot = 0.0;
    double s() const;  // -log(tau - t)
};

struct ModulationRates {
    double tau_dot = 0.0, kappa_dot = 0.0, xi_dot = 0.0;
};

// Default guard on |u_xxx(xi)| in units of (tau - t)^{-4}: 1% of the value 6
// taken by U_yyy(0) on the profile.
inline constexpr double kDefaultModulationGuard = 0.06;

// Rates from the field derivatives at x = xi. Throws SingularDenominator when
// |u_xxx(xi)| < guard (tau - t)^{-4}, DomainError when tau <= t.
ModulationRates modulation_rhs(const LocalFields& at_xi, const ModulationState& mod,
                               double guard = kDefaultModulationGuard);

// Standalone RK4 step with fields supplied by a callback (t, x) -> LocalFields.
// Throws DomainError once tau - t <= 0 (blow-up reached).
ModulationState advance_modulation(const ModulationState& mod,
                                   const std::function<LocalFields(double, double)>& fields, double dt,
                                   double guard = kDefaultModulationGuard);

// The modulation system integrated inside the fluid RK4 stages.
class ModulationTracker : public CoupledOde {
public:
    explicit ModulationTracker(double guard = kDefaultModulationGuard);
    std::size_t dim() const override { return 3; }
    void initial(std::span<double> y) const override;
    void rhs(const StageView& stage, std::span<const double> y, std::span<double> dydt) override;
    bool accept(const StageView& stage, std::span<const double> y) override;

    // State with rates evaluated on the given stage.
    ModulationState evaluate(const StageView& stage, std::span<const double> y) const;
    const std::vector<ModulationState>& history() const { return history_; }

private:
    double guard_;
    std::vector<ModulationState> history_;
};

// Pointwise fields at sample positions, the input to the frame transform.
struct FieldSnapshot {
    double t = 0.0;
    std::vector<double> x;
    std::vector<LocalFields> f;
};

FieldSnapshot snapshot_of(const StageView& view);
// Derivatives by repeated 5-point differences on the sample positions.
FieldSnapshot snapshot_from_state(const FluidState& state);
// Cubic interpolation of every field to xq (clamped to the sample range).
LocalFields interpolate_fields(const FieldSnapshot& snap, double xq);

struct SelfSimilarFrame {
    double t = 0.0, s = 0.0;
    double tau = 0.0, kappa = 0.0, xi = 0.0;
    std::vector<double> y;
    std::vector<double> U, Uy, Uyy, Uyyy, Uyyyy;
    std::vector<double> P, Phi;
    std::vector<double> Ubar, Ubar_y;
    // Constraint residuals at y = 0.
    double res_U = 0.0;    // |U(0)|
    double res_Uy = 0.0;   // |U_y(0) + 1|
    double res_Uyy = 0.0;  // |U_yy(0)|
    double Uyyy0 = 0.0;
    bool truncated = false;  // requested y range left the sampled region
    double y_lo = 0.0, y_hi = 0.0;
    double points_per_unit_y = 0.0;  // sample density in y at y = 0
};

// Resamples the snapshot at x = xi + y (tau - t)^{3/2}. y values outside the
// sampled region are dropped and flagged. Throws DomainError when tau <= t.
SelfSimilarFrame to_selfsimilar(const FieldSnapshot& snap, const ModulationState& mod, std::span<const double> y_grid);

struct BootstrapMonitor {
    std::array<double, 7> V{};
    std::array<double, 7> K{};
    std::array<bool, 7> exceeded{};
    double M = 0.0, A = 0.0;
    bool under_resolved = false;  // fewer than 9 samples per unit y at the origin
    bool any_exceeded() const;
};

inline constexpr double kDefaultBootstrapM = 1e4;

// Weighted suprema V1..V7 over the frame and thresholds
// K = (1/10, 1, 15, 1, M^{5/6}, M, 2A). Requires max |y| >= 10.
BootstrapMonitor bootstrap_quantities(const SelfSimilarFrame& frame, double A, double M = kDefaultBootstrapM);

}  // namespace dshock
