#include "dshock/experiment.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dshock/errors.hpp"
#include "dshock/numerics.hpp"
#include "dshock/pressureless_euler.hpp"
#include "dshock/verify.hpp"

namespace dshock {

namespace fs = std::filesystem;
using io::CsvTable;
using io::json;

namespace {

std::string fmt(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) throw UsageError("config: " + key + ": not a number: " + s);
    return v;
}

std::size_t parse_size(const std::string& key, const std::string& s) {
    std::size_t v = 0;
    auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw UsageError("config: " + key + ": not a non-negative integer: " + s);
    return v;
}

bool parse_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw UsageError("config: " + key + ": not a boolean: " + s);
}

struct KeySpec {
    const char* key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

KeySpec dbl(const char* key, double ExperimentConfig::*m) {
    return {key, [m](const ExperimentConfig& c) { return fmt(c.*m); },
            [m, key](ExperimentConfig& c, const std::string& v) { c.*m = parse_double(key, v); }};
}

KeySpec size(const char* key, std::size_t ExperimentConfig::*m) {
    return {key, [m](const ExperimentConfig& c) { return std::to_string(c.*m); },
            [m, key](ExperimentConfig& c, const std::string& v) { c.*m = parse_size(key, v); }};
}

KeySpec flag(const char* key, bool ExperimentConfig::*m) {
    return {key, [m](const ExperimentConfig& c) { return std::string(c.*m ? "true" : "false"); },
            [m, key](ExperimentConfig& c, const std::string& v) { c.*m = parse_bool(key, v); }};
}

KeySpec str(const char* key, std::string ExperimentConfig::*m) {
    return {key, [m](const ExperimentConfig& c) { return c.*m; },
            [m](ExperimentConfig& c, const std::string& v) { c.*m = v; }};
}

const std::vector<KeySpec>& key_table() {
    static const std::vector<KeySpec> t = {
        str("experiment.preset", &ExperimentConfig::preset),
        str("init.kind", &ExperimentConfig::kind),
        dbl("init.eps", &ExperimentConfig::eps),
        str("init.file", &ExperimentConfig::file),
        dbl("grid.L", &ExperimentConfig::L),
        size("grid.n", &ExperimentConfig::n),
        dbl("grid.label_r", &ExperimentConfig::label_r),
        dbl("grid.label_ell", &ExperimentConfig::label_ell),
        dbl("solver.dt_max", &ExperimentConfig::dt_max),
        dbl("solver.c_cfl", &ExperimentConfig::c_cfl),
        dbl("solver.w_stop", &ExperimentConfig::w_stop),
        dbl("solver.newton_tol", &ExperimentConfig::newton_tol),
        dbl("solver.t_max", &ExperimentConfig::t_max),
        size("solver.max_steps", &ExperimentConfig::max_steps),
        size("snapshots.per_decade", &ExperimentConfig::per_decade),
        dbl("snapshots.t_every", &ExperimentConfig::t_every),
        dbl("snapshots.s_every", &ExperimentConfig::s_every),
        dbl("snapshots.halfwidth", &ExperimentConfig::halfwidth),
        flag("frame.modulation", &ExperimentConfig::modulation),
        dbl("frame.y_max", &ExperimentConfig::y_max),
        size("frame.n_y", &ExperimentConfig::n_y),
        dbl("frame.M", &ExperimentConfig::M),
        dbl("frame.guard", &ExperimentConfig::guard),
        {"diagnostics.betas",
         [](const ExperimentConfig& c) {
             std::string s;
             for (std::size_t i = 0; i < c.betas.size(); ++i) s += (i ? "," : "") + fmt(c.betas[i]);
             return s;
         },
         [](ExperimentConfig& c, const std::string& v) {
             c.betas.clear();
             std::stringstream ss(v);
             std::string item;
             while (std::getline(ss, item, ',')) c.betas.push_back(parse_double("diagnostics.betas", item));
         }},
        size("diagnostics.exclude_last", &ExperimentConfig::exclude_last),
        dbl("diagnostics.decades", &ExperimentConfig::decades),
        size("diagnostics.min_points", &ExperimentConfig::min_points),
        size("diagnostics.min_pair_span", &ExperimentConfig::min_pair_span),
        dbl("diagnostics.rho_floor", &ExperimentConfig::rho_floor),
        dbl("diagnostics.inner_factor", &ExperimentConfig::inner_factor),
        flag("verify.inequalities", &ExperimentConfig::inequalities),
        size("verify.transport_draws", &ExperimentConfig::transport_draws),
        {"verify.seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
         [](ExperimentConfig& c, const std::string& v) { c.seed = parse_size("verify.seed", v); }},
        str("output.dir", &ExperimentConfig::out),
    };
    return t;
}

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw UsageError("config: " + key + " " + what);
}

}  // namespace

ExperimentConfig preset_config(const std::string& name) {
    ExperimentConfig c;
    c.preset = name;
    if (name == "figure1") {
        c.kind = "figure1";
        c.label_r = 0.05;
        c.label_ell = 0.5;
        c.w_stop = 1e-5;
        c.per_decade = 20;
    } else if (name == "canonical") {
        c.kind = "canonical";
        c.eps = 0.05;
        c.n = 25001;
        c.label_r = 1e-3;
        c.label_ell = 5.0;
        c.t_max = 1.0;
        c.modulation = true;
        c.per_decade = 0;
        c.s_every = 0.5;
        c.halfwidth = 1.0;
    } else if (name == "pe-gauss" || name == "pe-sech") {
        c.kind = name == "pe-gauss" ? "pe:gauss" : "pe:sech";
        c.L = 10.0;
        c.label_r = 0.05;
        c.label_ell = 0.5;
        c.w_stop = 1e-5;
        c.per_decade = 20;
    } else {
        throw UsageError("unknown preset '" + name + "' (figure1, canonical, pe-gauss, pe-sech)");
    }
    return c;
}

std::vector<std::string> preset_names() { return {"figure1", "canonical", "pe-gauss", "pe-sech"}; }

void validate_config(const ExperimentConfig& c) {
    const bool known = c.kind == "canonical" || c.kind == "figure1" || c.kind == "file" || c.kind == "pe:gauss" ||
                       c.kind == "pe:sech" || c.kind == "pe:profile";
    require(known, "init.kind", "must be canonical, figure1, file, pe:gauss, pe:sech or pe:profile");
    require(c.eps > 0.0, "init.eps", "must be positive");
    require(c.kind != "file" || !c.file.empty(), "init.file", "is required for init.kind = file");
    require(c.L > 0.0, "grid.L", "must be positive");
    require(c.n >= 5 && c.n % 2 == 1, "grid.n", "must be odd and at least 5");
    require(c.label_r > 0.0 && c.label_r <= 1.0, "grid.label_r", "must lie in (0, 1]");
    require(c.label_ell > 0.0, "grid.label_ell", "must be positive");
    require(c.dt_max > 0.0, "solver.dt_max", "must be positive");
    require(c.c_cfl > 0.0, "solver.c_cfl", "must be positive");
    require(c.w_stop > 0.0 && c.w_stop < 1.0, "solver.w_stop", "must lie in (0, 1)");
    require(c.newton_tol > 0.0, "solver.newton_tol", "must be positive");
    require(c.t_max > 0.0, "solver.t_max", "must be positive");
    require(c.max_steps > 0, "solver.max_steps", "must be positive");
    require(c.s_every >= 0.0, "snapshots.s_every", "must be non-negative");
    require(c.t_every >= 0.0, "snapshots.t_every", "must be non-negative");
    require(c.halfwidth >= 0.0, "snapshots.halfwidth", "must be non-negative");
    require(c.per_decade > 0 || c.t_every > 0.0 || (c.modulation && c.s_every > 0.0), "snapshots.per_decade",
            "must be positive unless t_every or s_every (modulated runs) is set");
    require(!c.modulation || !c.pressureless(), "frame.modulation", "needs the field (not a pe: kind)");
    require(c.y_max >= 10.0, "frame.y_max", "must be at least 10");
    require(c.n_y >= 5, "frame.n_y", "must be at least 5");
    require(c.M > 0.0, "frame.M", "must be positive");
    require(c.guard > 0.0, "frame.guard", "must be positive");
    require(!c.betas.empty(), "diagnostics.betas", "must not be empty");
    for (double b : c.betas) require(b > 0.0 && b <= 1.0, "diagnostics.betas", "entries must lie in (0, 1]");
    require(c.decades > 0.0, "diagnostics.decades", "must be positive");
    require(c.min_points >= 3, "diagnostics.min_points", "must be at least 3");
    require(c.rho_floor > 0.0, "diagnostics.rho_floor", "must be positive");
    require(c.inner_factor >= 1.0, "diagnostics.inner_factor", "must be at least 1");
}

void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
    for (const auto& k : key_table())
        if (key == k.key) {
            k.set(c, value);
            return;
        }
    throw UsageError("config: unknown key " + key);
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.emplace_back(k.key);
    return out;
}

std::string to_ini(const ExperimentConfig& c) {
    std::string out, section;
    for (const auto& k : key_table()) {
        const std::string key = k.key;
        const auto dot = key.find('.');
        const std::string sec = key.substr(0, dot);
        if (sec != section) {
            out += (section.empty() ? "[" : "\n[") + sec + "]\n";
            section = sec;
        }
        out += key.substr(dot + 1) + " = " + k.get(c) + "\n";
    }
    return out;
}

ExperimentConfig load_config(const fs::path& ini, ExperimentConfig base) {
    boost::property_tree::ptree pt;
    try {
        boost::property_tree::read_ini(ini.string(), pt);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    for (const auto& [sec, body] : pt)
        for (const auto& [key, val] : body) set_config_value(base, sec + "." + key, val.data());
    return base;
}

fs::path output_root() {
    const char* env = std::getenv("DSHOCK_OUTPUT_ROOT");
    return (env && *env) ? fs::path(env) : fs::path("runs");
}

fs::path output_dir(const ExperimentConfig& c) {
    if (!c.out.empty()) return c.out;
    return output_root() / c.preset;
}

InitialData build_initial_data(const ExperimentConfig& c) {
    if (c.kind == "canonical") return canonical_data(c.eps);
    if (c.kind == "figure1") return figure1_data();
    if (c.pressureless()) return to_initial_data(pe_preset(c.kind.substr(3)));
    const CsvTable t = io::read_csv(c.file);
    return custom_from_samples(t.col("x"), t.col("rho0"), t.col("u0"), c.eps);
}

namespace {

SnapshotRecord take_snapshot(const LagrangianSolver& sv, const StepInfo& si, std::size_t index, double halfwidth,
                             const ModulationTracker* tracker) {
    const ParticleEnsemble& e = sv.ensemble();
    const FieldSnapshot full = snapshot_of(sv.view());
    const auto xm = integrate_labels(e.alpha, e.w, e.w2, si.argmin, e.x[si.argmin]);
    const auto um = integrate_labels(e.alpha, e.w_dot, e.w2_dot, si.argmin, e.u[si.argmin]);
    SnapshotRecord r;
    r.index = index;
    r.t = si.t;
    r.min_w = si.min_w;
    r.x_argmin = e.x[si.argmin];
    if (tracker && !tracker->history().empty()) r.mod = tracker->history().back();
    // Before any collapse the argmin is arbitrary; modulated runs follow xi.
    const double center = r.mod ? r.mod->xi : r.x_argmin;
    r.fields.t = full.t;
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (halfwidth > 0.0 && std::abs(e.x[i] - center) > halfwidth) continue;
        r.fields.x.push_back(full.x[i]);
        r.fields.f.push_back(full.f[i]);
        r.alpha.push_back(e.alpha[i]);
        r.w.push_back(e.w[i]);
        r.x_map.push_back(xm[i]);
        r.u_map.push_back(um[i]);
    }
    return r;
}

}  // namespace

SimulationOutput simulate(const ExperimentConfig& c, const InitialData& data) {
    LabelMap lm;
    lm.r = c.label_r;
    lm.ell = c.label_ell;
    SolverOptions o;
    o.field = !c.pressureless();
    o.newton_tol = c.newton_tol;
    o.dt_max = c.dt_max;
    o.c_cfl = c.c_cfl;
    o.w_stop = c.w_stop;
    o.t_max = c.t_max;
    o.max_steps = c.max_steps;
    ModulationTracker tracker(c.guard);
    ModulationTracker* tp = c.modulation ? &tracker : nullptr;
    LagrangianSolver solver(init_particles(data, -c.L, c.L, c.n, lm), o, tp);

    SimulationOutput out;
    long level = -1;
    double next_s = -INFINITY;
    double next_t = data.t0;
    double last_snap_t = NAN;
    auto on_step = [&](const LagrangianSolver& sv, const StepInfo& si) {
        bool take = out.snapshots.empty();
        if (c.per_decade > 0) {
            const long lv = static_cast<long>(std::floor(-std::log10(si.min_w) * static_cast<double>(c.per_decade) + 1e-9));
            if (lv > level) {
                take = true;
                level = lv;
            }
        }
        if (c.t_every > 0.0 && si.t >= next_t - 1e-12 * c.t_every) {
            take = true;
            next_t = data.t0 + (std::floor((si.t - data.t0) / c.t_every + 1e-9) + 1.0) * c.t_every;
        }
        if (tp && c.s_every > 0.0 && !tracker.history().empty()) {
            const double s = tracker.history().back().s();
            if (s >= next_s) {
                take = true;
                next_s = (std::floor(s / c.s_every + 1e-9) + 1.0) * c.s_every;
            }
        }
        if (!take) return;
        out.snapshots.push_back(take_snapshot(sv, si, out.snapshots.size(), c.halfwidth, tp));
        last_snap_t = si.t;
    };
    RunResult rr = solver.run_until_blowup(on_step);
    if (!(rr.records.back().t == last_snap_t))
        out.snapshots.push_back(take_snapshot(solver, rr.records.back(), out.snapshots.size(), c.halfwidth, tp));
    out.steps = std::move(rr.records);
    out.event = rr.event;
    if (tp) out.modulation = tracker.history();
    return out;
}

namespace {

std::string snap_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshots/snap_%04zu.csv", i);
    return buf;
}

std::string frame_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frames/frame_%04zu.csv", i);
    return buf;
}

template <class T, class F>
std::vector<double> column(const std::vector<T>& v, F f) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(static_cast<double>(f(x)));
    return out;
}

const std::vector<std::pair<const char*, double LocalFields::*>>& field_columns() {
    static const std::vector<std::pair<const char*, double LocalFields::*>> c = {
        {"rho", &LocalFields::rho},         {"u", &LocalFields::u},           {"phi", &LocalFields::phi},
        {"ux", &LocalFields::ux},           {"uxx", &LocalFields::uxx},       {"uxxx", &LocalFields::uxxx},
        {"rho_x", &LocalFields::rho_x},     {"phi_x", &LocalFields::phi_x},   {"phi_xx", &LocalFields::phi_xx},
        {"phi_xxx", &LocalFields::phi_xxx}};
    return c;
}

}  // namespace

void write_simulation(io::ArtifactLog& log, const SimulationOutput& sim) {
    CsvTable st;
    const auto& s = sim.steps;
    st.add("t", column(s, [](const StepInfo& r) { return r.t; }));
    st.add("dt", column(s, [](const StepInfo& r) { return r.dt; }));
    st.add("min_w", column(s, [](const StepInfo& r) { return r.min_w; }));
    st.add("argmin", column(s, [](const StepInfo& r) { return r.argmin; }));
    st.add("max_ux", column(s, [](const StepInfo& r) { return r.max_ux; }));
    st.add("H", column(s, [](const StepInfo& r) { return r.energy.total; }));
    st.add("kinetic", column(s, [](const StepInfo& r) { return r.energy.kinetic; }));
    st.add("field", column(s, [](const StepInfo& r) { return r.energy.field; }));
    st.add("electron", column(s, [](const StepInfo& r) { return r.energy.electron; }));
    st.add("mass", column(s, [](const StepInfo& r) { return r.mass; }));
    st.add("phi_sup", column(s, [](const StepInfo& r) { return r.phi_sup; }));
    st.add("phi_x_sup", column(s, [](const StepInfo& r) { return r.phi_x_sup; }));
    st.add("rho_w_defect", column(s, [](const StepInfo& r) { return r.rho_w_defect; }));
    st.add("spacing_defect", column(s, [](const StepInfo& r) { return r.spacing_defect; }));
    st.add("newton_iterations", column(s, [](const StepInfo& r) { return r.newton_iterations; }));
    log.csv("steps.csv", st);
    log.write("events.json", io::to_json(sim.event));

    CsvTable idx;
    const auto& sn = sim.snapshots;
    idx.add("index", column(sn, [](const SnapshotRecord& r) { return r.index; }));
    idx.add("t", column(sn, [](const SnapshotRecord& r) { return r.t; }));
    idx.add("min_w", column(sn, [](const SnapshotRecord& r) { return r.min_w; }));
    idx.add("x_argmin", column(sn, [](const SnapshotRecord& r) { return r.x_argmin; }));
    idx.add("has_mod", column(sn, [](const SnapshotRecord& r) { return r.mod ? 1 : 0; }));
    idx.add("tau", column(sn, [](const SnapshotRecord& r) { return r.mod ? r.mod->tau : NAN; }));
    idx.add("kappa", column(sn, [](const SnapshotRecord& r) { return r.mod ? r.mod->kappa : NAN; }));
    idx.add("xi", column(sn, [](const SnapshotRecord& r) { return r.mod ? r.mod->xi : NAN; }));
    idx.add("tau_dot", column(sn, [](const SnapshotRecord& r) { return r.mod ? r.mod->tau_dot : NAN; }));
    idx.add("kappa_dot", column(sn, [](const SnapshotRecord& r) { return r.mod ? r.mod->kappa_dot : NAN; }));
    idx.add("xi_dot", column(sn, [](const SnapshotRecord& r) { return r.mod ? r.mod->xi_dot : NAN; }));
    log.csv("snapshots.csv", idx);
    for (const auto& r : sn) {
        CsvTable t;
        t.meta = {{"t", fmt(r.t)}, {"min_w", fmt(r.min_w)}, {"index", std::to_string(r.index)}};
        t.add("alpha", r.alpha);
        t.add("x", r.fields.x);
        t.add("w", r.w);
        t.add("x_map", r.x_map);
        t.add("u_map", r.u_map);
        for (const auto& [name, m] : field_columns())
            t.add(name, column(r.fields.f, [m = m](const LocalFields& f) { return f.*m; }));
        log.csv(snap_name(r.index), t);
    }

    if (!sim.modulation.empty()) {
        CsvTable m;
        const auto& h = sim.modulation;
        m.add("t", column(h, [](const ModulationState& x) { return x.t; }));
        m.add("s", column(h, [](const ModulationState& x) { return x.s(); }));
        m.add("tau", column(h, [](const ModulationState& x) { return x.tau; }));
        m.add("kappa", column(h, [](const ModulationState& x) { return x.kappa; }));
        m.add("xi", column(h, [](const ModulationState& x) { return x.xi; }));
        m.add("tau_dot", column(h, [](const ModulationState& x) { return x.tau_dot; }));
        m.add("kappa_dot", column(h, [](const ModulationState& x) { return x.kappa_dot; }));
        m.add("xi_dot", column(h, [](const ModulationState& x) { return x.xi_dot; }));
        log.csv("modulation.csv", m);
    }
}

SimulationOutput load_simulation(const fs::path& dir) {
    SimulationOutput sim;
    const CsvTable st = io::read_csv(dir / "steps.csv");
    for (std::size_t i = 0; i < st.rows(); ++i) {
        StepInfo r;
        r.t = st.col("t")[i];
        r.dt = st.col("dt")[i];
        r.min_w = st.col("min_w")[i];
        r.argmin = static_cast<std::size_t>(st.col("argmin")[i]);
        r.max_ux = st.col("max_ux")[i];
        r.energy.total = st.col("H")[i];
        r.energy.kinetic = st.col("kinetic")[i];
        r.energy.field = st.col("field")[i];
        r.energy.electron = st.col("electron")[i];
        r.mass = st.col("mass")[i];
        r.phi_sup = st.col("phi_sup")[i];
        r.phi_x_sup = st.col("phi_x_sup")[i];
        r.rho_w_defect = st.col("rho_w_defect")[i];
        r.spacing_defect = st.col("spacing_defect")[i];
        r.newton_iterations = static_cast<int>(st.col("newton_iterations")[i]);
        sim.steps.push_back(r);
    }
    const json ev = io::read_json(dir / "events.json");
    auto num = [&](const char* k) { return ev.at(k).is_null() ? NAN : ev.at(k).get<double>(); };
    sim.event.detected = ev.at("detected").get<bool>();
    sim.event.t_star = num("t_star");
    sim.event.x_star = num("x_star");
    sim.event.alpha_star = num("alpha_star");
    sim.event.min_w_at_stop = num("min_w_at_stop");
    sim.event.fit_r2 = num("fit_r2");
    sim.event.timed_out = ev.at("timed_out").get<bool>();
    sim.event.stopped_by_coupled = ev.at("stopped_by_coupled").get<bool>();

    const CsvTable idx = io::read_csv(dir / "snapshots.csv");
    for (std::size_t k = 0; k < idx.rows(); ++k) {
        SnapshotRecord r;
        r.index = static_cast<std::size_t>(idx.col("index")[k]);
        r.t = idx.col("t")[k];
        r.min_w = idx.col("min_w")[k];
        r.x_argmin = idx.col("x_argmin")[k];
        if (idx.col("has_mod")[k] != 0.0) {
            ModulationState m;
            m.t = r.t;
            m.tau = idx.col("tau")[k];
            m.kappa = idx.col("kappa")[k];
            m.xi = idx.col("xi")[k];
            m.tau_dot = idx.col("tau_dot")[k];
            m.kappa_dot = idx.col("kappa_dot")[k];
            m.xi_dot = idx.col("xi_dot")[k];
            r.mod = m;
        }
        const CsvTable t = io::read_csv(dir / snap_name(r.index));
        r.alpha = t.col("alpha");
        r.w = t.col("w");
        r.x_map = t.col("x_map");
        r.u_map = t.col("u_map");
        r.fields.t = r.t;
        r.fields.x = t.col("x");
        r.fields.f.resize(t.rows());
        for (const auto& [name, m] : field_columns()) {
            const auto& col = t.col(name);
            for (std::size_t i = 0; i < t.rows(); ++i) r.fields.f[i].*m = col[i];
        }
        sim.snapshots.push_back(std::move(r));
    }

    if (fs::exists(dir / "modulation.csv")) {
        const CsvTable m = io::read_csv(dir / "modulation.csv");
        for (std::size_t i = 0; i < m.rows(); ++i) {
            ModulationState s;
            s.t = m.col("t")[i];
            s.tau = m.col("tau")[i];
            s.kappa = m.col("kappa")[i];
            s.xi = m.col("xi")[i];
            s.tau_dot = m.col("tau_dot")[i];
            s.kappa_dot = m.col("kappa_dot")[i];
            s.xi_dot = m.col("xi_dot")[i];
            sim.modulation.push_back(s);
        }
    }
    return sim;
}

FrameSeries selfsim_frames(const SimulationOutput& sim, double y_max, std::size_t n_y, double A, double M) {
    FrameSeries fs;
    const auto ys = num::linspace(-y_max, y_max, n_y);
    for (const auto& r : sim.snapshots) {
        if (!r.mod) continue;
        SelfSimilarFrame fr = to_selfsimilar(r.fields, *r.mod, ys);
        BootstrapMonitor b;
        try {
            b = bootstrap_quantities(fr, A, M);
        } catch (const UsageError& e) {
            fs.warnings.push_back("snapshot " + std::to_string(r.index) + ": " + e.what());
            continue;
        }
        const bool ok = !b.under_resolved && !fr.truncated;
        if (ok) fs.s_resolved_end = std::max(fs.s_resolved_end, fr.s);
        fs.frames.push_back(std::move(fr));
        fs.monitors.push_back(b);
        fs.resolved.push_back(ok);
    }
    if (fs.frames.empty()) {
        fs.warnings.push_back("no snapshot carries a modulation state");
        return fs;
    }
    // |tau_dot| decay over the final resolved decade of tau - t.
    std::vector<double> s, l;
    const double s_lo = fs.s_resolved_end - std::log(10.0);
    for (const auto& m : sim.modulation) {
        const double sm = m.s();
        if (sm >= s_lo && sm <= fs.s_resolved_end && m.tau_dot != 0.0) {
            s.push_back(sm);
            l.push_back(std::log(std::abs(m.tau_dot)));
        }
    }
    if (s.size() >= 3) {
        const num::LineFit f = num::fit_line(s, l);
        fs.tau_dot_decay.exponent = f.slope;
        fs.tau_dot_decay.prefactor = std::exp(f.intercept);
        fs.tau_dot_decay.r2 = f.r2;
        fs.tau_dot_decay.window_lo = s.front();
        fs.tau_dot_decay.window_hi = s.back();
        fs.tau_dot_decay.points = s.size();
    } else {
        fs.warnings.push_back("fewer than 3 modulation records in the final resolved decade");
    }
    return fs;
}

void write_frames(io::ArtifactLog& log, const FrameSeries& fs) {
    for (std::size_t k = 0; k < fs.frames.size(); ++k) {
        const SelfSimilarFrame& f = fs.frames[k];
        CsvTable t;
        t.meta = {{"s", fmt(f.s)}, {"t", fmt(f.t)}, {"tau", fmt(f.tau)}, {"kappa", fmt(f.kappa)}, {"xi", fmt(f.xi)}};
        t.add("y", f.y);
        t.add("U", f.U);
        t.add("P", f.P);
        t.add("Phi", f.Phi);
        t.add("Ubar", f.Ubar);
        std::vector<double> d(f.y.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = f.U[i] - f.Ubar[i];
        t.add("U_minus_Ubar", d);
        t.add("Uy", f.Uy);
        t.add("Uyy", f.Uyy);
        t.add("Uyyy", f.Uyyy);
        t.add("Uyyyy", f.Uyyyy);
        log.csv(frame_name(k), t);
    }
    CsvTable m;
    const std::size_t n = fs.frames.size();
    auto col = [&](auto f) {
        std::vector<double> v(n);
        for (std::size_t k = 0; k < n; ++k) v[k] = f(k);
        return v;
    };
    m.add("s", col([&](std::size_t k) { return fs.frames[k].s; }));
    m.add("t", col([&](std::size_t k) { return fs.frames[k].t; }));
    for (std::size_t i = 0; i < 7; ++i)
        m.add("V" + std::to_string(i + 1), col([&](std::size_t k) { return fs.monitors[k].V[i]; }));
    m.add("tau", col([&](std::size_t k) { return fs.frames[k].tau; }));
    m.add("kappa", col([&](std::size_t k) { return fs.frames[k].kappa; }));
    m.add("xi", col([&](std::size_t k) { return fs.frames[k].xi; }));
    m.add("res_U", col([&](std::size_t k) { return fs.frames[k].res_U; }));
    m.add("res_Uy", col([&](std::size_t k) { return fs.frames[k].res_Uy; }));
    m.add("res_Uyy", col([&](std::size_t k) { return fs.frames[k].res_Uyy; }));
    m.add("Uyyy0", col([&](std::size_t k) { return fs.frames[k].Uyyy0; }));
    m.add("points_per_unit_y", col([&](std::size_t k) { return fs.frames[k].points_per_unit_y; }));
    m.add("truncated", col([&](std::size_t k) { return fs.frames[k].truncated ? 1.0 : 0.0; }));
    m.add("resolved", col([&](std::size_t k) { return fs.resolved[k] ? 1.0 : 0.0; }));
    if (n > 0) {
        const BootstrapMonitor& b = fs.monitors.front();
        m.meta = {{"A", fmt(b.A)}, {"M", fmt(b.M)}};
        for (std::size_t i = 0; i < 7; ++i) m.meta.emplace_back("K" + std::to_string(i + 1), fmt(b.K[i]));
    }
    log.csv("monitor.csv", m);
}

FitSettings fit_settings(const ExperimentConfig& c) {
    FitSettings s;
    s.betas = c.betas;
    s.window.exclude_last = c.exclude_last;
    s.window.decades = c.decades;
    s.window.min_points = c.min_points;
    s.spatial.rho_floor = c.rho_floor;
    s.spatial.inner_factor = c.inner_factor;
    s.min_pair_span = c.min_pair_span;
    return s;
}

BlowupReport fit_blowup(const SimulationOutput& sim, const FitSettings& s) {
    BlowupReport r;
    std::vector<double> t, ux;
    for (const auto& st : sim.steps) {
        t.push_back(st.t);
        ux.push_back(st.max_ux);
    }
    try {
        r.ux_inverse_fit = estimate_tstar(t, ux, s.window);
    } catch (const std::exception& e) {
        r.warnings.push_back(std::string("ux_inverse_fit: ") + e.what());
    }
    if (sim.event.detected) {
        r.t_star = sim.event.t_star;
        r.x_star = sim.event.x_star;
    } else {
        r.t_star = r.ux_inverse_fit.t_star;
        r.warnings.push_back("blow-up not detected; t_star from the 1/max|u_x| fit, x_star unavailable");
    }
    if (!std::isfinite(r.t_star)) return r;

    // Snapshots strictly before t_star whose maximizing pairs for every
    // beta > 1/3 span at least min_pair_span samples.
    std::vector<double> ts;
    std::map<double, std::vector<double>> sem;
    std::size_t dropped = 0;
    for (const auto& sn : sim.snapshots) {
        if (!(sn.t < r.t_star) || sn.x_map.size() < 3) continue;
        std::map<double, double> vals;
        bool ok = true;
        for (double b : s.betas) {
            const HolderResult h = holder_seminorm(sn.x_map, sn.u_map, b);
            vals[b] = h.value;
            if (b > 1.0 / 3.0 + 1e-12 && !holder_resolved(h, s.min_pair_span)) ok = false;
        }
        if (!ok) {
            ++dropped;
            continue;
        }
        ts.push_back(sn.t);
        for (const auto& [b, v] : vals) sem[b].push_back(v);
    }
    if (dropped > 0)
        r.warnings.push_back(std::to_string(dropped) + " snapshots left out of the temporal fits: maximizing pair spans fewer than " +
                             std::to_string(s.min_pair_span) + " samples");
    for (double b : s.betas) {
        try {
            r.temporal_fits[b] = fit_temporal_rate(ts, sem[b], r.t_star, b, s.window);
        } catch (const std::exception& e) {
            r.warnings.push_back("temporal fit beta=" + fmt(b) + ": " + e.what());
        }
    }

    if (std::isfinite(r.x_star) && !sim.snapshots.empty()) {
        const auto& last = sim.snapshots.back();
        std::vector<double> rho(last.fields.f.size());
        for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = last.fields.f[i].rho;
        try {
            r.spatial_fit = fit_spatial_profile(last.x_map, rho, r.x_star, s.spatial);
        } catch (const std::exception& e) {
            r.warnings.push_back(std::string("spatial fit: ") + e.what());
        }
    }
    return r;
}

EnergyDrift energy_drift(const SimulationOutput& sim, double w_stop) {
    EnergyDrift d;
    if (sim.steps.empty()) return d;
    d.H0 = sim.steps.front().energy.total;
    const double scale = std::abs(d.H0) > 0.0 ? std::abs(d.H0) : 1.0;
    for (const auto& s : sim.steps) {
        if (s.min_w < 10.0 * w_stop) continue;
        d.max_rel_drift = std::max(d.max_rel_drift, std::abs(s.energy.total - d.H0) / scale);
        ++d.records;
    }
    return d;
}

namespace {

std::string error_name(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e)) return "UsageError";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    if (dynamic_cast<const SolverError*>(&e)) return "SolverError";
    if (dynamic_cast<const NumericError*>(&e)) return "NumericError";
    if (dynamic_cast<const InsufficientData*>(&e)) return "InsufficientData";
    if (dynamic_cast<const SingularDenominator*>(&e)) return "SingularDenominator";
    return "error";
}

json frame_summary(const FrameSeries& fs) {
    std::array<double, 7> vmax{};
    double res = 0.0;
    std::size_t nres = 0;
    for (std::size_t k = 0; k < fs.frames.size(); ++k) {
        if (!fs.resolved[k]) continue;
        ++nres;
        for (std::size_t i = 0; i < 7; ++i) vmax[i] = std::max(vmax[i], fs.monitors[k].V[i]);
        res = std::max({res, fs.frames[k].res_U, fs.frames[k].res_Uy, fs.frames[k].res_Uyy});
    }
    json v = json::array(), k = json::array();
    for (std::size_t i = 0; i < 7; ++i) {
        v.push_back(vmax[i]);
        k.push_back(fs.monitors.empty() ? NAN : fs.monitors.front().K[i]);
    }
    return {{"frames", fs.frames.size()},
            {"resolved_frames", nres},
            {"s_resolved_end", fs.s_resolved_end},
            {"V_max_resolved", v},
            {"K", k},
            {"max_constraint_residual_resolved", res},
            {"tau_dot_decay", io::to_json(fs.tau_dot_decay)},
            {"warnings", fs.warnings}};
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& c) {
    validate_config(c);
    ExperimentOutcome out;
    out.dir = output_dir(c);
    fs::create_directories(out.dir);
    io::ArtifactLog log(out.dir);
    log.text("config.ini", to_ini(c));

    bool failed = false;
    auto stage = [&](const std::string& name, const std::function<std::string()>& body) {
        if (failed) return;
        try {
            std::string detail = body();
            const bool skipped = detail.rfind("skipped: ", 0) == 0;
            out.stages.push_back({name, skipped ? "skipped" : "ok", skipped ? detail.substr(9) : detail});
        } catch (const std::exception& e) {
            out.stages.push_back({name, "failed", error_name(e) + ": " + e.what()});
            failed = true;
        }
    };

    InitialData data;
    AConstant A;
    stage("initdata", [&] {
        data = build_initial_data(c);
        LabelMap lm;
        lm.r = c.label_r;
        lm.ell = c.label_ell;
        const ParticleEnsemble e = init_particles(data, -c.L, c.L, c.n, lm);
        CsvTable t;
        t.meta = {{"kind", c.kind}, {"eps", fmt(c.eps)}, {"t0", fmt(data.t0)}};
        t.add("x", e.alpha);
        t.add("rho0", column(e.alpha, [&](double a) { return data.rho[0](a); }));
        t.add("u0", column(e.alpha, [&](double a) { return data.u[0](a); }));
        const char* names[] = {"du0", "d2u0", "d3u0", "d4u0"};
        for (int k = 1; k <= 4; ++k) t.add(names[k - 1], column(e.alpha, [&](double a) { return data.u[k](a); }));
        log.csv("init.csv", t);
        A = compute_A(1e-6);
        return std::string("t0 = ") + fmt(data.t0);
    });
    stage("validate", [&]() -> std::string {
        if (c.pressureless()) return "skipped: conditions concern Euler-Poisson data";
        out.admissibility = validate(data, c.eps, -c.L, c.L, A);
        log.write("validation.json", io::to_json(*out.admissibility));
        std::size_t bad = 0;
        for (const auto& k : out.admissibility->conditions) bad += k.pass ? 0 : 1;
        return bad == 0 ? "all conditions pass"
                        : std::to_string(bad) + " condition(s) fail; reported in validation.json, not fatal";
    });
    stage("simulate", [&] {
        out.sim = simulate(c, data);
        write_simulation(log, out.sim);
        out.energy = energy_drift(out.sim, c.w_stop);
        return std::string(out.sim.event.detected ? "blow-up detected" : "blow-up not detected") + ", " +
               std::to_string(out.sim.steps.size() - 1) + " steps, " + std::to_string(out.sim.snapshots.size()) +
               " snapshots";
    });
    stage("selfsim", [&]() -> std::string {
        if (!c.modulation) return "skipped: modulation disabled";
        out.frames = selfsim_frames(out.sim, c.y_max, c.n_y, A.A, c.M);
        write_frames(log, *out.frames);
        return std::to_string(out.frames->frames.size()) + " frames";
    });
    stage("fit", [&] {
        out.report = fit_blowup(out.sim, fit_settings(c));
        json j = io::to_json(*out.report);
        j["time_convention"] = "t is absolute solver time; lifespan is elapsed time t_star - t0";
        j["t0"] = data.t0;
        j["lifespan"] = out.report->t_star - data.t0;
        j["event"] = io::to_json(out.sim.event);
        j["energy"] = {{"H0", out.energy.H0},
                       {"max_rel_drift_before_final_decade", out.energy.max_rel_drift},
                       {"records", out.energy.records}};
        if (out.frames) j["selfsim"] = frame_summary(*out.frames);
        log.write("report.json", j);
        return std::to_string(out.report->warnings.size()) + " warning(s)";
    });
    stage("verify", [&]() -> std::string {
        std::string d;
        if (c.inequalities) {
            log.write("inequalities.json", io::to_json(check_profile_inequalities()));
            d += "inequalities";
        }
        if (c.transport_draws > 0) {
            json t = {{"max_principle", io::to_json(check_max_principle(c.seed, c.transport_draws))},
                      {"decay", json::array({io::to_json(check_decay(1.0, 0.5, 1.0)),
                                             io::to_json(check_decay(0.5, 1.0, 1.0))})}};
            log.write("transport.json", t);
            d += d.empty() ? "transport" : ", transport";
        }
        return d.empty() ? "skipped: disabled" : d;
    });

    out.exit_code = failed ? 1 : 0;
    json st = json::array();
    for (const auto& s : out.stages) st.push_back({{"stage", s.name}, {"status", s.status}, {"detail", s.detail}});
    out.manifest = {{"schema", io::kCsvSchema},
                    {"preset", c.preset},
                    {"exit_code", out.exit_code},
                    {"stages", st},
                    {"artifacts", log.listing()}};
    io::write_json(out.dir / "manifest.json", out.manifest);
    return out;
}

}  // namespace dshock
