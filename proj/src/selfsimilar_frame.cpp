#include "dshock/selfsimilar_frame.hpp"

#include <algorithm>
#include <cmath>

#include "dshock/burgers_profile.hpp"
#include "dshock/errors.hpp"
#include "dshock/numerics.hpp"

namespace dshock {

double ModulationState::s() const { return -std::log(tau - t); }

ModulationRates modulation_rhs(const LocalFields& f, const ModulationState& mod, double guard) {
    const double T = mod.tau - mod.t;
    if (!(T > 0.0)) throw DomainError("modulation: tau - t <= 0 (blow-up reached)");
    const double floor = guard / (T * T * T * T);
    if (!(std::abs(f.uxxx) >= floor))
        throw SingularDenominator("modulation: |u_xxx(xi)| = " + std::to_string(std::abs(f.uxxx)) +
                                  " below guard " + std::to_string(floor));
    ModulationRates r;
    const double q = f.phi_xxx / f.uxxx;
    r.tau_dot = -T * T * f.phi_xx;
    r.kappa_dot = -q / T - f.phi_x;
    r.xi_dot = q + mod.kappa;
    return r;
}

ModulationState advance_modulation(const ModulationState& mod,
                                   const std::function<LocalFields(double, double)>& fields, double dt,
                                   double guard) {
    auto rates = [&](double t, const std::array<double, 3>& y) {
        ModulationState m;
        m.t = t;
        m.tau = y[0];
        m.kappa = y[1];
        m.xi = y[2];
        ModulationRates r = modulation_rhs(fields(t, m.xi), m, guard);
        return std::array<double, 3>{r.tau_dot, r.kappa_dot, r.xi_dot};
    };
    const std::array<double, 3> y0{mod.tau, mod.kappa, mod.xi};
    auto shift = [&](const std::array<double, 3>& k, double h) {
        return std::array<double, 3>{y0[0] + h * k[0], y0[1] + h * k[1], y0[2] + h * k[2]};
    };
    const auto k1 = rates(mod.t, y0);
    const auto k2 = rates(mod.t + 0.5 * dt, shift(k1, 0.5 * dt));
    const auto k3 = rates(mod.t + 0.5 * dt, shift(k2, 0.5 * dt));
    const auto k4 = rates(mod.t + dt, shift(k3, dt));
    ModulationState out;
    out.t = mod.t + dt;
    out.tau = y0[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    out.kappa = y0[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    out.xi = y0[2] + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
    if (!(out.tau - out.t > 0.0)) throw DomainError("modulation: tau - t <= 0 (blow-up reached)");
    ModulationRates r = modulation_rhs(fields(out.t, out.xi), out, guard);
    out.tau_dot = r.tau_dot;
    out.kappa_dot = r.kappa_dot;
    out.xi_dot = r.xi_dot;
    return out;
}

ModulationTracker::ModulationTracker(double guard) : guard_(guard) {}

void ModulationTracker::initial(std::span<double> y) const { std::fill(y.begin(), y.end(), 0.0); }

ModulationState ModulationTracker::evaluate(const StageView& stage, std::span<const double> y) const {
    ModulationState m;
    m.t = stage.t();
    m.tau = y[0];
    m.kappa = y[1];
    m.xi = y[2];
    ModulationRates r = modulation_rhs(stage.at(m.xi), m, guard_);
    m.tau_dot = r.tau_dot;
    m.kappa_dot = r.kappa_dot;
    m.xi_dot = r.xi_dot;
    return m;
}

void ModulationTracker::rhs(const StageView& stage, std::span<const double> y, std::span<double> dydt) {
    ModulationState m = evaluate(stage, y);
    dydt[0] = m.tau_dot;
    dydt[1] = m.kappa_dot;
    dydt[2] = m.xi_dot;
}

bool ModulationTracker::accept(const StageView& stage, std::span<const double> y) {
    if (!(y[0] - stage.t() > 0.0)) return false;
    history_.push_back(evaluate(stage, y));
    return true;
}

FieldSnapshot snapshot_of(const StageView& view) {
    FieldSnapshot s;
    s.t = view.t();
    s.x.assign(view.x().begin(), view.x().end());
    s.f.resize(view.size());
    for (std::size_t i = 0; i < view.size(); ++i) s.f[i] = view.at_particle(i);
    return s;
}

FieldSnapshot snapshot_from_state(const FluidState& st) {
    if (st.size() < 5) throw UsageError("snapshot_from_state: need at least 5 samples");
    FieldSnapshot s;
    s.t = st.t;
    s.x = st.x;
    const auto ux = num::diff_nonuniform(st.x, st.u);
    const auto uxx = num::diff_nonuniform(st.x, ux);
    const auto uxxx = num::diff_nonuniform(st.x, uxx);
    const auto rx = num::diff_nonuniform(st.x, st.rho);
    std::vector<double> px(st.size(), 0.0);
    if (st.has_phi()) px = num::diff_nonuniform(st.x, st.phi);
    s.f.resize(st.size());
    for (std::size_t i = 0; i < st.size(); ++i) {
        LocalFields& f = s.f[i];
        f.u = st.u[i];
        f.ux = ux[i];
        f.uxx = uxx[i];
        f.uxxx = uxxx[i];
        f.rho = st.rho[i];
        f.rho_x = rx[i];
        if (st.has_phi()) {
            const double E = std::exp(st.phi[i]);
            f.phi = st.phi[i];
            f.phi_x = px[i];
            f.phi_xx = E - f.rho;
            f.phi_xxx = E * f.phi_x - f.rho_x;
        }
    }
    return s;
}

LocalFields interpolate_fields(const FieldSnapshot& snap, double xq) {
    const std::size_t n = snap.x.size();
    if (n < 4) throw UsageError("interpolate_fields: need at least 4 samples");
    xq = std::clamp(xq, snap.x.front(), snap.x.back());
    const std::size_t i = num::bracket(snap.x, xq);
    const std::size_t s = (i == 0) ? 0 : std::min(i - 1, n - 4);
    double wts[4];
    for (std::size_t j = 0; j < 4; ++j) {
        double l = 1.0;
        for (std::size_t m = 0; m < 4; ++m)
            if (m != j) l *= (xq - snap.x[s + m]) / (snap.x[s + j] - snap.x[s + m]);
        wts[j] = l;
    }
    LocalFields out;
    for (auto fld : {&LocalFields::u, &LocalFields::ux, &LocalFields::uxx, &LocalFields::uxxx, &LocalFields::rho,
                     &LocalFields::rho_x, &LocalFields::phi, &LocalFields::phi_x, &LocalFields::phi_xx,
                     &LocalFields::phi_xxx}) {
        double v = 0.0;
        for (std::size_t j = 0; j < 4; ++j) v += wts[j] * (snap.f[s + j].*fld);
        out.*fld = v;
    }
    return out;
}

SelfSimilarFrame to_selfsimilar(const FieldSnapshot& snap, const ModulationState& mod, std::span<const double> y_grid) {
    const double T = mod.tau - snap.t;
    if (!(T > 0.0)) throw DomainError("to_selfsimilar: tau - t <= 0");
    SelfSimilarFrame fr;
    fr.t = snap.t;
    fr.s = -std::log(T);
    fr.tau = mod.tau;
    fr.kappa = mod.kappa;
    fr.xi = mod.xi;
    const double es = 1.0 / T;
    const double len = std::pow(T, 1.5);  // x per unit y
    // d^n/dy^n U = e^{s/2} e^{-3ns/2} d^n/dx^n u
    const double c0 = std::sqrt(es), c1 = c0 / std::pow(es, 1.5), c2 = c1 / std::pow(es, 1.5),
                 c3 = c2 / std::pow(es, 1.5);

    fr.y_lo = INFINITY;
    fr.y_hi = -INFINITY;
    for (double y : y_grid) {
        const double x = mod.xi + y * len;
        if (x < snap.x.front() || x > snap.x.back()) {
            fr.truncated = true;
            continue;
        }
        const LocalFields f = interpolate_fields(snap, x);
        fr.y.push_back(y);
        fr.U.push_back(c0 * (f.u - mod.kappa));
        fr.Uy.push_back(c1 * f.ux);
        fr.Uyy.push_back(c2 * f.uxx);
        fr.Uyyy.push_back(c3 * f.uxxx);
        fr.P.push_back((f.rho - 1.0) / es);
        fr.Phi.push_back(f.phi);
        const ProfileSample p = sample_profile(y);
        fr.Ubar.push_back(p.u_bar);
        fr.Ubar_y.push_back(p.d1);
        fr.y_lo = std::min(fr.y_lo, y);
        fr.y_hi = std::max(fr.y_hi, y);
    }
    if (fr.y.size() >= 5) {
        fr.Uyyyy = num::diff_nonuniform(fr.y, fr.Uyyy);
    } else {
        fr.Uyyyy.assign(fr.y.size(), 0.0);
    }

    if (mod.xi >= snap.x.front() && mod.xi <= snap.x.back()) {
        const LocalFields f0 = interpolate_fields(snap, mod.xi);
        fr.res_U = std::abs(c0 * (f0.u - mod.kappa));
        fr.res_Uy = std::abs(c1 * f0.ux + 1.0);
        fr.res_Uyy = std::abs(c2 * f0.uxx);
        fr.Uyyy0 = c3 * f0.uxxx;
        const std::size_t i = num::bracket(snap.x, mod.xi);
        fr.points_per_unit_y = len / (snap.x[i + 1] - snap.x[i]);
    } else {
        fr.res_U = fr.res_Uy = fr.res_Uyy = INFINITY;
        fr.truncated = true;
    }
    return fr;
}

bool BootstrapMonitor::any_exceeded() const {
    return std::any_of(exceeded.begin(), exceeded.end(), [](bool b) { return b; });
}

BootstrapMonitor bootstrap_quantities(const SelfSimilarFrame& fr, double A, double M) {
    if (fr.y.empty() || std::max(std::abs(fr.y_lo), std::abs(fr.y_hi)) < 10.0)
        throw UsageError("bootstrap_quantities: frame must resolve |y| up to at least 10");
    BootstrapMonitor b;
    b.A = A;
    b.M = M;
    b.K = {0.1, 1.0, 15.0, 1.0, std::pow(M, 5.0 / 6.0), M, 2.0 * A};
    auto& V = b.V;
    for (std::size_t k = 0; k < fr.y.size(); ++k) {
        const double y = fr.y[k];
        const double ay = std::abs(y);
        const double dev = std::abs(fr.Uy[k] - fr.Ubar_y[k]);
        const double w23 = std::cbrt(y * y);
        if (ay > 0.0) {
            V[0] = std::max(V[0], (1.0 + y * y) / (y * y) * dev);
            V[2] = std::max(V[2], std::sqrt(1.0 + y * y) / ay * std::abs(fr.Uyy[k]));
        }
        V[1] = std::max(V[1], (w23 + 8.0) * dev);
        V[4] = std::max(V[4], std::abs(fr.Uyyy[k]));
        V[5] = std::max(V[5], std::abs(fr.Uyyyy[k]));
        V[6] = std::max(V[6], (w23 + 8.0) * std::abs(fr.P[k]));
    }
    V[3] = std::abs(fr.Uyyy0 - 6.0);
    for (std::size_t i = 0; i < 7; ++i) b.exceeded[i] = !(V[i] < b.K[i]);
    b.under_resolved = fr.points_per_unit_y < 9.0;
    return b;
}

}  // namespace dshock
