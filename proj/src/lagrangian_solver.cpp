#include "dshock/lagrangian_solver.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "dshock/errors.hpp"
#include "dshock/kernels.hpp"
#include "dshock/numerics.hpp"

namespace dshock {

namespace {
constexpr std::size_t kBlocks = 8;  // x, u, w1, w1d, w2, w2d, w3, w3d
}

double LabelMap::alpha(double zeta) const { return center + zeta - (1.0 - r) * ell * std::tanh(zeta / ell); }

double LabelMap::zeta(double a) const {
    if (r == 1.0) return a - center;
    const double target = a - center;
    auto g = [&](double z) { return z - (1.0 - r) * ell * std::tanh(z / ell) - target; };
    boost::math::tools::eps_tolerance<double> tol(52);
    auto br = boost::math::tools::bisect(g, target - ell, target + ell, tol);
    return 0.5 * (br.first + br.second);
}

ParticleEnsemble init_particles(const InitialData& d, double a, double b, std::size_t n, const LabelMap& map) {
    if (n < 101) throw UsageError("init_particles: need n >= 101");
    if (!(b > a)) throw UsageError("init_particles: need a < b");
    if (!(map.r > 0.0 && map.r <= 1.0) || !(map.ell > 0.0)) throw UsageError("init_particles: bad label map");
    ParticleEnsemble e;
    e.t = d.t0;
    const double za = map.zeta(a), zb = map.zeta(b);
    e.alpha.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        e.alpha[i] = map.alpha(za + (zb - za) * static_cast<double>(i) / static_cast<double>(n - 1));
    e.alpha.front() = a;
    e.alpha.back() = b;
    e.x = e.alpha;
    e.u.resize(n);
    e.w.assign(n, 1.0);
    e.w_dot.resize(n);
    e.w2.assign(n, 0.0);
    e.w2_dot.resize(n);
    e.w3.assign(n, 0.0);
    e.w3_dot.resize(n);
    e.rho0.resize(n);
    e.rho0_d1.resize(n);
    e.rho0_d2.resize(n);
    e.mass.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double al = e.alpha[i];
        e.rho0[i] = d.rho[0](al);
        if (!(e.rho0[i] > 0.0)) throw DomainError("init_particles: rho0 must be positive");
        e.rho0_d1[i] = d.rho[1](al);
        e.rho0_d2[i] = d.rho[2](al);
        e.u[i] = d.u[0](al);
        e.w_dot[i] = d.u[1](al);
        e.w2_dot[i] = d.u[2](al);
        e.w3_dot[i] = d.u[3](al);
        const double lo = e.alpha[i == 0 ? 0 : i - 1], hi = e.alpha[i + 1 == n ? n - 1 : i + 1];
        e.mass[i] = e.rho0[i] * 0.5 * (hi - lo);
    }
    e.phi.assign(n, 0.0);
    e.phi_x.assign(n, 0.0);
    return e;
}

StageView::StageView(const ParticleEnsemble& base, double t, std::span<const double> y, std::span<const double> phi,
                     std::span<const double> phi_x, bool field)
    : base_(base), t_(t), n_(base.size()), phi_(phi), phi_x_(phi_x), field_(field) {
    auto blk = [&](std::size_t k) { return y.subspan(k * n_, n_); };
    x_ = blk(0);
    u_ = blk(1);
    w1_ = blk(2);
    w1d_ = blk(3);
    w2_ = blk(4);
    w2d_ = blk(5);
    w3_ = blk(6);
    w3d_ = blk(7);
}

LocalFields StageView::at_particle(std::size_t i) const {
    LocalFields f;
    const double w = w1_[i];
    f.u = u_[i];
    f.ux = w1d_[i] / w;
    f.uxx = (w2d_[i] - f.ux * w2_[i]) / (w * w);
    f.uxxx = (w3d_[i] - 3.0 * f.uxx * w * w2_[i] - f.ux * w3_[i]) / (w * w * w);
    f.rho = base_.rho0[i] / w;
    f.rho_x = (base_.rho0_d1[i] * w - base_.rho0[i] * w2_[i]) / (w * w * w);
    if (field_) {
        const double E = std::exp(phi_[i]);
        f.phi = phi_[i];
        f.phi_x = phi_x_[i];
        f.phi_xx = E - f.rho;
        f.phi_xxx = E * f.phi_x - f.rho_x;
    }
    return f;
}

LocalFields StageView::at(double xq) const {
    const std::size_t i = num::bracket(x_, xq);
    const std::size_t s = (i == 0) ? 0 : std::min(i - 1, n_ - 4);
    LocalFields nodes[4];
    double xs[4];
    for (int k = 0; k < 4; ++k) {
        nodes[k] = at_particle(s + static_cast<std::size_t>(k));
        xs[k] = x_[s + static_cast<std::size_t>(k)];
    }
    double wts[4];
    for (int j = 0; j < 4; ++j) {
        double l = 1.0;
        for (int m = 0; m < 4; ++m)
            if (m != j) l *= (xq - xs[m]) / (xs[j] - xs[m]);
        wts[j] = l;
    }
    LocalFields out;
    auto mix = [&](double LocalFields::*field) {
        double v = 0.0;
        for (int j = 0; j < 4; ++j) v += wts[j] * (nodes[j].*field);
        out.*field = v;
    };
    for (auto fld : {&LocalFields::u, &LocalFields::ux, &LocalFields::uxx, &LocalFields::uxxx, &LocalFields::rho,
                     &LocalFields::rho_x, &LocalFields::phi, &LocalFields::phi_x, &LocalFields::phi_xx,
                     &LocalFields::phi_xxx})
        mix(fld);
    return out;
}

LagrangianSolver::LagrangianSolver(ParticleEnsemble ens, SolverOptions opt, CoupledOde* coupled)
    : ens_(std::move(ens)), opt_(opt), coupled_(coupled) {
    if (!(opt_.w_stop > 0.0 && opt_.w_stop <= 0.1)) throw UsageError("w_stop must lie in (0, 0.1]");
    if (!(opt_.c_cfl > 0.0) || !(opt_.dt_max > 0.0)) throw UsageError("dt controls must be positive");
    if (coupled_) {
        ode_state_.resize(coupled_->dim());
        coupled_->initial(ode_state_);
    }
    refresh_field();
}

void LagrangianSolver::pack(std::vector<double>& y) const {
    const std::size_t n = ens_.size();
    y.resize(kBlocks * n + ode_state_.size());
    const std::vector<double>* src[kBlocks] = {&ens_.x, &ens_.u, &ens_.w, &ens_.w_dot,
                                              &ens_.w2, &ens_.w2_dot, &ens_.w3, &ens_.w3_dot};
    for (std::size_t k = 0; k < kBlocks; ++k) std::copy(src[k]->begin(), src[k]->end(), y.begin() + k * n);
    std::copy(ode_state_.begin(), ode_state_.end(), y.begin() + kBlocks * n);
}

void LagrangianSolver::unpack(std::span<const double> y) {
    const std::size_t n = ens_.size();
    std::vector<double>* dst[kBlocks] = {&ens_.x, &ens_.u, &ens_.w, &ens_.w_dot,
                                        &ens_.w2, &ens_.w2_dot, &ens_.w3, &ens_.w3_dot};
    for (std::size_t k = 0; k < kBlocks; ++k) std::copy(y.begin() + k * n, y.begin() + (k + 1) * n, dst[k]->begin());
    std::copy(y.begin() + kBlocks * n, y.end(), ode_state_.begin());
}

void LagrangianSolver::rhs(double t, std::span<const double> y, std::span<double> dy, std::vector<double>& phi,
                           std::vector<double>& phi_x) {
    const std::size_t n = ens_.size();
    auto in = [&](std::size_t k) { return y.subspan(k * n, n); };
    auto out = [&](std::size_t k) { return dy.subspan(k * n, n); };
    auto x = in(0), u = in(1), w1 = in(2), w1d = in(3), w2 = in(4), w2d = in(5), w3 = in(6), w3d = in(7);
    auto dx = out(0), du = out(1), dw1 = out(2), dw1d = out(3), dw2 = out(4), dw2d = out(5), dw3 = out(6),
         dw3d = out(7);
    std::copy(u.begin(), u.end(), dx.begin());
    std::copy(w1d.begin(), w1d.end(), dw1.begin());
    std::copy(w2d.begin(), w2d.end(), dw2.begin());
    std::copy(w3d.begin(), w3d.end(), dw3.begin());

    const bool frozen = std::isfinite(opt_.frozen_field);
    if (!opt_.field && !frozen) {
        std::fill(du.begin(), du.end(), 0.0);
        std::fill(dw1d.begin(), dw1d.end(), 0.0);
        std::fill(dw2d.begin(), dw2d.end(), 0.0);
        std::fill(dw3d.begin(), dw3d.end(), 0.0);
        phi.assign(n, 0.0);
        phi_x.assign(n, 0.0);
    } else if (frozen) {
        // e^phi held at a constant: no force, w'' = rho0 - m w.
        const double m = opt_.frozen_field;
        std::fill(du.begin(), du.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            dw1d[i] = ens_.rho0[i] - m * w1[i];
            dw2d[i] = ens_.rho0_d1[i] - m * w2[i];
            dw3d[i] = ens_.rho0_d2[i] - m * w3[i];
        }
        phi.assign(n, std::log(m));
        phi_x.assign(n, 0.0);
    } else {
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x[i + 1] > x[i]))
                throw DomainError("particle ordering lost at t = " + std::to_string(t) + " (characteristics crossed)");
        NewtonOptions nopt;
        nopt.tol = opt_.newton_tol;
        NodeField f = solve_newton_nodes(x, ens_.mass, phi, nopt);
        last_newton_iterations_ = f.iterations;
        phi = std::move(f.phi);
        phi_x = std::move(f.phi_x);
        for (std::size_t i = 0; i < n; ++i) {
            double F = 0.0;
            if (i + 1 < n) {
                const double e = (phi[i + 1] - phi[i]) / (x[i + 1] - x[i]);
                F += 0.5 * e * e - 0.5 * std::expm1(phi[i + 1]);
            }
            if (i > 0) {
                const double e = (phi[i] - phi[i - 1]) / (x[i] - x[i - 1]);
                F += -0.5 * e * e + 0.5 * std::expm1(phi[i - 1]);
            }
            du[i] = F / ens_.mass[i];

            const double E = std::exp(phi[i]);
            const double px = phi_x[i];
            const double rho = ens_.rho0[i] / w1[i];
            const double pxx = E - rho;
            const double Ea = E * px * w1[i];
            const double Eaa = E * (px * px * w1[i] * w1[i] + pxx * w1[i] * w1[i] + px * w2[i]);
            dw1d[i] = ens_.rho0[i] - E * w1[i];
            dw2d[i] = ens_.rho0_d1[i] - Ea * w1[i] - E * w2[i];
            dw3d[i] = ens_.rho0_d2[i] - Eaa * w1[i] - 2.0 * Ea * w2[i] - E * w3[i];
        }
    }
    if (coupled_) {
        StageView view(ens_, t, y, phi, phi_x, opt_.field || frozen);
        coupled_->rhs(view, y.subspan(kBlocks * n), dy.subspan(kBlocks * n));
    }
}

void LagrangianSolver::refresh_field() {
    std::vector<double> y, dy;
    pack(y);
    dy.resize(y.size());
    std::vector<double> phi = ens_.phi, phi_x = ens_.phi_x;
    // The coupled rhs is not needed here; evaluate the fluid part only.
    CoupledOde* saved = coupled_;
    coupled_ = nullptr;
    std::vector<double> yf(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(kBlocks * ens_.size()));
    std::vector<double> dyf(yf.size());
    rhs(ens_.t, yf, dyf, phi, phi_x);
    coupled_ = saved;
    ens_.phi = std::move(phi);
    ens_.phi_x = std::move(phi_x);
}

void LagrangianSolver::step(double dt) {
    if (!(dt > 0.0)) throw UsageError("step: dt must be positive");
    const double t = ens_.t;
    std::vector<double> y0, k1, k2, k3, k4, tmp;
    pack(y0);
    const std::size_t m = y0.size();
    k1.resize(m);
    k2.resize(m);
    k3.resize(m);
    k4.resize(m);
    std::vector<double> phi = ens_.phi, phi_x = ens_.phi_x;
    rhs(t, y0, k1, phi, phi_x);
    tmp = y0;
    kernels::axpy(tmp, 0.5 * dt, k1);
    rhs(t + 0.5 * dt, tmp, k2, phi, phi_x);
    tmp = y0;
    kernels::axpy(tmp, 0.5 * dt, k2);
    rhs(t + 0.5 * dt, tmp, k3, phi, phi_x);
    tmp = y0;
    kernels::axpy(tmp, dt, k3);
    rhs(t + dt, tmp, k4, phi, phi_x);
    kernels::axpy(y0, dt / 6.0, k1);
    kernels::axpy(y0, dt / 3.0, k2);
    kernels::axpy(y0, dt / 3.0, k3);
    kernels::axpy(y0, dt / 6.0, k4);
    unpack(y0);
    ens_.t = t + dt;
    ens_.phi = std::move(phi);
    refresh_field();
}

StageView LagrangianSolver::view() const {
    pack(view_buf_);
    return StageView(ens_, ens_.t, view_buf_, ens_.phi, ens_.phi_x, opt_.field || std::isfinite(opt_.frozen_field));
}

double LagrangianSolver::suggested_dt() const {
    double dt = opt_.dt_max;
    for (std::size_t i = 0; i < ens_.size(); ++i)
        if (ens_.w_dot[i] < 0.0) dt = std::min(dt, opt_.c_cfl * ens_.w[i] / -ens_.w_dot[i]);
    if (opt_.t_max - ens_.t > 0.0) dt = std::min(dt, opt_.t_max - ens_.t);
    return dt;
}

EnergyBreakdown discrete_energy(const ParticleEnsemble& e) {
    const std::size_t n = e.size();
    EnergyBreakdown out;
    for (std::size_t i = 0; i < n; ++i) {
        out.kinetic += 0.5 * e.mass[i] * e.u[i] * e.u[i];
        const double lo = e.x[i == 0 ? 0 : i - 1], hi = e.x[i + 1 == n ? n - 1 : i + 1];
        out.electron += 0.5 * (hi - lo) * electron_density_energy(e.phi[i]);
        if (i + 1 < n) {
            const double d = e.phi[i + 1] - e.phi[i];
            out.field += 0.5 * d * d / (e.x[i + 1] - e.x[i]);
        }
    }
    out.total = out.kinetic + out.field + out.electron;
    return out;
}

StepInfo LagrangianSolver::info() const {
    StepInfo s;
    const std::size_t n = ens_.size();
    s.t = ens_.t;
    s.min_w = INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = ens_.w[i];
        if (w < s.min_w) {
            s.min_w = w;
            s.argmin = i;
        }
        s.max_ux = std::max(s.max_ux, std::abs(ens_.w_dot[i] / w));
        s.mass += ens_.mass[i];
        s.phi_sup = std::max(s.phi_sup, std::abs(ens_.phi[i]));
        s.phi_x_sup = std::max(s.phi_x_sup, std::abs(ens_.phi_x[i]));
        const double rho = ens_.rho0[i] / w;
        s.rho_w_defect = std::max(s.rho_w_defect, std::abs(rho * w - ens_.rho0[i]));
        if (i > 0 && i + 1 < n) {
            const double ws = (ens_.x[i + 1] - ens_.x[i - 1]) / (ens_.alpha[i + 1] - ens_.alpha[i - 1]);
            s.spacing_defect = std::max(s.spacing_defect, std::abs(ws - w) / std::abs(w));
        }
    }
    s.energy = discrete_energy(ens_);
    s.newton_iterations = last_newton_iterations_;
    return s;
}

RunResult LagrangianSolver::run_until_blowup(
    const std::function<void(const LagrangianSolver&, const StepInfo&)>& on_step) {
    RunResult res;
    StepInfo first = info();
    res.records.push_back(first);
    if (coupled_ && !coupled_->accept(view(), ode_state_)) throw UsageError("coupled ODE rejected the initial state");
    if (on_step) on_step(*this, first);
    std::size_t steps = 0;
    while (true) {
        const StepInfo& cur = res.records.back();
        if (cur.min_w <= opt_.w_stop) {
            res.event.detected = true;
            break;
        }
        if (ens_.t >= opt_.t_max - 1e-15 || steps >= opt_.max_steps) {
            res.event.timed_out = true;
            break;
        }
        const double dt = suggested_dt();
        step(dt);
        ++steps;
        StepInfo si = info();
        si.dt = dt;
        res.records.push_back(si);
        bool keep = true;
        if (coupled_) keep = coupled_->accept(view(), ode_state_);
        if (on_step) on_step(*this, si);
        if (!keep) {
            res.event.stopped_by_coupled = true;
            break;
        }
    }
    const StepInfo& last = res.records.back();
    res.event.min_w_at_stop = last.min_w;
    if (res.event.detected) {
        const std::size_t is = last.argmin;
        // Final decade of w at the blowing-up label: w is linear in t there.
        std::vector<double> ts, ws;
        for (const auto& r : res.records)
            if (r.argmin == is && r.min_w <= 10.0 * opt_.w_stop) {
                ts.push_back(r.t);
                ws.push_back(r.min_w);
            }
        if (ts.size() < 3) {
            ts.clear();
            ws.clear();
            for (std::size_t k = res.records.size() >= 3 ? res.records.size() - 3 : 0; k < res.records.size(); ++k) {
                ts.push_back(res.records[k].t);
                ws.push_back(res.records[k].min_w);
            }
        }
        num::LineFit f = num::fit_line(ts, ws);
        res.event.t_star = -f.intercept / f.slope;
        res.event.fit_r2 = f.r2;
        res.event.alpha_star = ens_.alpha[is];
        res.event.x_star = ens_.x[is] + (res.event.t_star - ens_.t) * ens_.u[is];
    }
    return res;
}

FluidState to_fluid_state(const ParticleEnsemble& e) {
    FluidState s;
    s.t = e.t;
    s.x = e.x;
    s.u = e.u;
    s.phi = e.phi;
    s.rho.resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) s.rho[i] = e.rho0[i] / e.w[i];
    return s;
}

std::vector<double> integrate_labels(std::span<const double> a, std::span<const double> f,
                                     std::span<const double> fa, std::size_t anchor, double value) {
    const std::size_t n = a.size();
    if (f.size() != n || fa.size() != n || anchor >= n) throw UsageError("integrate_labels: size mismatch");
    auto cell = [&](std::size_t i) {
        const double h = a[i + 1] - a[i];
        return 0.5 * h * (f[i] + f[i + 1]) + h * h / 12.0 * (fa[i] - fa[i + 1]);
    };
    std::vector<double> out(n);
    out[anchor] = value;
    for (std::size_t i = anchor; i + 1 < n; ++i) out[i + 1] = out[i] + cell(i);
    for (std::size_t i = anchor; i > 0; --i) out[i - 1] = out[i] - cell(i - 1);
    return out;
}

double constant_field_w(double t, double m, double b, double wd0) {
    const double k = std::sqrt(m);
    return (1.0 - b / m) * std::cos(k * t) + wd0 * std::sin(k * t) / k + b / m;
}

CriterionResult blowup_criterion(const Profile& rho0, const Profile& du0, double m1, double m2,
                                 std::span<const double> alphas) {
    if (!(m1 > 0.0) || m1 > m2) throw UsageError("blowup_criterion: need 0 < m1 <= m2");
    CriterionResult r;
    for (double a : alphas) {
        const double b = rho0(a);
        const double d = du0(a);
        const double rad1 = 2.0 * b - m2 + (4.0 * b * b / m1) * ((m2 - m1) / m1);
        if (rad1 >= 0.0 && d >= std::sqrt(rad1) && !r.A1_witness) r.A1_witness = a;
        const double rad2 = 2.0 * b - m1;
        if (rad2 <= 0.0) {
            if (!r.low_density_witness) r.low_density_witness = a;
            continue;
        }
        const double margin = -std::sqrt(rad2) - d;
        r.A2_margin = std::max(r.A2_margin, margin);
        if (margin >= 0.0 && !r.A2_witness) r.A2_witness = a;
    }
    return r;
}

}  // namespace dshock
