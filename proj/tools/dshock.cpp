// Command-line front end. Exit codes: 0 success, 1 stage or numerical
// failure, 2 usage error.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "dshock/burgers_profile.hpp"
#include "dshock/errors.hpp"
#include "dshock/experiment.hpp"
#include "dshock/io.hpp"
#include "dshock/numerics.hpp"
#include "dshock/poisson_field.hpp"
#include "dshock/pressureless_euler.hpp"
#include "dshock/verify.hpp"

namespace fs = std::filesystem;
using namespace dshock;
using io::CsvTable;
using io::json;

namespace {

void apply_sets(ExperimentConfig& c, const std::vector<std::string>& sets) {
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got " + kv);
        set_config_value(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

void print_stages(const ExperimentOutcome& o) {
    for (const auto& s : o.stages) std::printf("%-9s %-8s %s\n", s.name.c_str(), s.status.c_str(), s.detail.c_str());
    std::printf("artifacts in %s\n", o.dir.string().c_str());
}

int cmd_profile(double ymin, double ymax, std::size_t n, const std::string& out) {
    if (!(ymax > ymin) || n < 2) throw UsageError("profile: need ymax > ymin and n >= 2");
    CsvTable t;
    const auto ys = num::linspace(ymin, ymax, n);
    std::vector<double> cols[5];
    for (double y : ys) {
        const ProfileSample p = sample_profile(y);
        cols[0].push_back(p.u_bar);
        cols[1].push_back(p.d1);
        cols[2].push_back(p.d2);
        cols[3].push_back(p.d3);
        cols[4].push_back(p.d4);
    }
    t.add("y", ys);
    t.add("Ubar", cols[0]);
    t.add("d1", cols[1]);
    t.add("d2", cols[2]);
    t.add("d3", cols[3]);
    t.add("d4", cols[4]);
    io::write_csv(out, t);
    return 0;
}

int cmd_poisson(const std::string& rho_file, const std::string& solver, double tol, const std::string& quadrature,
                const std::string& out) {
    const CsvTable in = io::read_csv(rho_file);
    const auto& x = in.col("x");
    const auto& rho = in.col("rho");
    if (x.size() < 3) throw UsageError("poisson: need at least 3 samples");
    Grid1D g{x.front(), (x.back() - x.front()) / static_cast<double>(x.size() - 1), x.size()};
    g.validate();
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - g.x(i)) > 1e-9 * g.dx) throw UsageError("poisson: x must be uniformly spaced");
    FieldSolution sol;
    if (solver == "newton") {
        NewtonOptions o;
        o.tol = tol;
        sol = solve_newton(g, rho, o);
    } else if (solver == "greens") {
        GreensOptions o;
        o.tol = tol;
        o.quadrature = quadrature == "exact_cell" ? KernelQuadrature::exact_cell : KernelQuadrature::discrete;
        std::vector<double> f(rho.size());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = rho[i] - 1.0;
        sol = solve_greens_iteration(g, f, o);
    } else {
        throw UsageError("poisson: --solver must be newton or greens");
    }
    CsvTable t;
    t.meta = {{"solver", solver}, {"iterations", std::to_string(sol.iterations)}};
    t.add("x", g.nodes());
    t.add("phi", sol.phi);
    t.add("phi_x", sol.phi_x);
    t.add("phi_xx", sol.phi_xx);
    io::write_csv(out, t);
    std::printf("iterations %d, residual %.3e\n", sol.iterations, sol.residual);
    return 0;
}

int cmd_initdata(const std::string& kind, double eps, const std::string& file, double L, std::size_t n,
                 bool do_validate, const std::string& report, const std::string& out) {
    ExperimentConfig c;
    c.kind = kind;
    c.eps = eps;
    c.file = file;
    c.L = L;
    c.n = n;
    validate_config(c);
    const InitialData d = build_initial_data(c);
    const auto xs = num::linspace(-L, L, n);
    CsvTable t;
    t.meta = {{"kind", kind}, {"eps", std::to_string(eps)}};
    t.add("x", xs);
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = d.rho[0](xs[i]);
    t.add("rho0", col);
    const char* names[] = {"u0", "du0", "d2u0", "d3u0", "d4u0"};
    for (int k = 0; k < 5; ++k) {
        for (std::size_t i = 0; i < n; ++i) col[i] = d.u[k](xs[i]);
        t.add(names[k], col);
    }
    io::write_csv(out, t);
    if (!do_validate) return 0;
    const AdmissibilityReport r = validate(d, eps, -L, L, compute_A(1e-6));
    for (const auto& k : r.conditions)
        std::printf("%-20s %s margin %.3e at x = %.3e%s\n", k.name.c_str(), k.pass ? "pass" : "FAIL", k.margin, k.at_x,
                    k.surrogate ? " (surrogate)" : "");
    if (!report.empty()) io::write_json(report, io::to_json(r));
    return 0;
}

int cmd_compute_a(double tol) {
    const AConstant a = compute_A(tol);
    std::printf("A = %.10g\nsup I = %.10g at y = %.6g\n", a.A, a.sup_I, a.argmax_y);
    return 0;
}

int cmd_simulate(ExperimentConfig c, const std::string& out) {
    c.out = out;
    validate_config(c);
    const InitialData d = build_initial_data(c);
    const SimulationOutput sim = simulate(c, d);
    io::ArtifactLog log(output_dir(c));
    log.text("config.ini", to_ini(c));
    write_simulation(log, sim);
    io::write_json(log.path("manifest.json"), {{"schema", io::kCsvSchema}, {"artifacts", log.listing()}});
    std::printf("%s at t = %.10g, %zu steps, %zu snapshots\n", sim.event.detected ? "blow-up" : "no blow-up",
                sim.event.detected ? sim.event.t_star : sim.steps.back().t, sim.steps.size() - 1,
                sim.snapshots.size());
    return 0;
}

int cmd_selfsim(const std::string& run, double y_max, std::size_t n_y, double M, const std::string& out) {
    const SimulationOutput sim = load_simulation(run);
    const FrameSeries fs = selfsim_frames(sim, y_max, n_y, compute_A(1e-6).A, M);
    io::ArtifactLog log(out);
    write_frames(log, fs);
    for (const auto& w : fs.warnings) std::printf("warning: %s\n", w.c_str());
    std::printf("%zu frames, resolved through s = %.4f\n", fs.frames.size(), fs.s_resolved_end);
    return 0;
}

int cmd_fit(const std::string& run, const std::string& betas, const std::string& out) {
    const SimulationOutput sim = load_simulation(run);
    FitSettings s;
    if (!betas.empty()) s.betas = parse_list(betas);
    for (double b : s.betas)
        if (!(b > 0.0 && b <= 1.0)) throw UsageError("fit: betas must lie in (0, 1]");
    const BlowupReport r = fit_blowup(sim, s);
    io::write_json(out, io::to_json(r));
    std::printf("t_star %.10g  x_star %.4g\n", r.t_star, r.x_star);
    for (const auto& [b, f] : r.temporal_fits)
        std::printf("beta %.4f  exponent %.4f  expected %.4f  (%s)\n", b, f.fit.exponent, f.expected,
                    to_string(f.status));
    std::printf("spatial exponent %.4f\n", r.spatial_fit.slope.exponent);
    for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
    return 0;
}

int cmd_verify_inequalities(const std::string& out) {
    const auto r = check_profile_inequalities();
    io::write_json(out, io::to_json(r));
    bool all = true;
    for (const auto& x : r) {
        std::printf("%-20s %s min margin %.3e\n", x.name.c_str(), x.pass ? "pass" : "FAIL", x.min_margin);
        all = all && x.pass;
    }
    return all ? 0 : 1;
}

int cmd_verify_transport(std::uint64_t seed, std::size_t draws, const std::string& out) {
    const MaxPrincipleReport mp = check_max_principle(seed, draws);
    const DecayCheck d1 = check_decay(1.0, 0.5, 1.0), d2 = check_decay(0.5, 1.0, 1.0);
    io::write_json(out, {{"max_principle", io::to_json(mp)}, {"decay", json::array({io::to_json(d1), io::to_json(d2)})}});
    std::printf("max principle: %zu admissible draws, %zu counterexamples\n", mp.admissible, mp.counterexamples);
    std::printf("decay: %s, %s\n", d1.holds ? "holds" : "FAILS", d2.holds ? "holds" : "FAILS");
    return (mp.counterexamples == 0 && d1.holds && d2.holds) ? 0 : 1;
}

PEInitialData pe_from_arg(const std::string& v0) {
    if (v0.rfind("preset:", 0) != 0) throw UsageError("--v0 expects preset:<gauss|sech|profile>");
    return pe_preset(v0.substr(7));
}

int cmd_pe_exact(const std::string& v0, double t, std::size_t n, double a, double b, const std::string& out) {
    const PEInitialData d = pe_from_arg(v0);
    const auto al = num::linspace(a, b, n);
    const PEState s = exact_state(d, d.t0 + t, al);
    CsvTable tab;
    tab.meta = {{"t0", std::to_string(d.t0)}, {"elapsed", std::to_string(t)}};
    tab.add("alpha", s.alpha);
    tab.add("x", s.x);
    tab.add("v", s.v);
    tab.add("n", s.n);
    tab.add("w", s.w);
    io::write_csv(out, tab);
    return 0;
}

int cmd_pe_lifespan(const std::string& v0) {
    const Lifespan l = lifespan(pe_from_arg(v0));
    if (!l.blows_up) {
        std::printf("no blow-up\n");
        return 0;
    }
    std::printf("lifespan %.12g (elapsed), t_star %.12g, x_star %.6g, alpha_star %.6g\n", l.elapsed, l.t_star,
                l.x_star, l.alpha_star);
    return 0;
}

ExperimentConfig make_config(const std::string& preset, const std::string& config_file,
                             const std::vector<std::string>& sets) {
    ExperimentConfig c = preset.empty() ? ExperimentConfig{} : preset_config(preset);
    if (!config_file.empty()) c = load_config(config_file, c);
    apply_sets(c, sets);
    return c;
}

int cmd_run(ExperimentConfig c, const std::string& out) {
    if (!out.empty()) c.out = out;
    const ExperimentOutcome o = run_experiment(c);
    print_stages(o);
    return o.exit_code;
}

int cmd_sweep(const ExperimentConfig& base, const std::string& key, const std::string& values, std::size_t workers,
              const std::string& out) {
    std::vector<std::string> vals;
    std::stringstream ss(values);
    std::string v;
    while (std::getline(ss, v, ',')) vals.push_back(v);
    if (vals.empty()) throw UsageError("sweep: --values is empty");
    const fs::path root = out.empty() ? output_root() / ("sweep_" + base.preset) : fs::path(out);
    std::vector<ExperimentConfig> cfgs;
    for (const auto& x : vals) {
        ExperimentConfig c = base;
        set_config_value(c, key, x);
        c.out = (root / (key + "=" + x)).string();
        validate_config(c);
        cfgs.push_back(c);
    }
    std::vector<int> codes(cfgs.size(), 1);
    std::atomic<std::size_t> next{0};
    std::mutex print;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < cfgs.size();) {
            int code = 1;
            try {
                code = run_experiment(cfgs[i]).exit_code;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lk(print);
                std::fprintf(stderr, "%s=%s: %s\n", key.c_str(), vals[i].c_str(), e.what());
            }
            codes[i] = code;
            std::lock_guard<std::mutex> lk(print);
            std::printf("%s=%s exit %d\n", key.c_str(), vals[i].c_str(), code);
        }
    };
    std::vector<std::thread> pool;
    const std::size_t nw = std::max<std::size_t>(1, std::min(workers, cfgs.size()));
    for (std::size_t k = 0; k < nw; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    json runs = json::array();
    int worst = 0;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
        runs.push_back({{"value", vals[i]}, {"dir", key + "=" + vals[i]}, {"exit_code", codes[i]}});
        worst = std::max(worst, codes[i]);
    }
    io::write_json(root / "sweep.json", {{"key", key}, {"runs", runs}});
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delta-shock formation in pressureless Euler-Poisson: simulation and verification"};
    app.require_subcommand(1);
    int rc = 0;

    // profile
    double ymin = -10, ymax = 10;
    std::size_t ny = 2001;
    std::string out;
    auto* profile = app.add_subcommand("profile", "Tabulate the Burgers profile and its derivatives");
    profile->add_option("--ymin", ymin);
    profile->add_option("--ymax", ymax);
    profile->add_option("--n", ny);
    profile->add_option("--out", out)->required();
    profile->callback([&] { rc = cmd_profile(ymin, ymax, ny, out); });

    // poisson
    std::string rho_file, solver = "newton", quadrature = "discrete";
    double tol = 1e-10;
    auto* poisson = app.add_subcommand("poisson", "Solve -phi_xx = rho - e^phi for a density table (x, rho)");
    poisson->add_option("--rho-file", rho_file)->required();
    poisson->add_option("--solver", solver)->check(CLI::IsMember({"newton", "greens"}));
    poisson->add_option("--tol", tol);
    poisson->add_option("--quadrature", quadrature)->check(CLI::IsMember({"discrete", "exact_cell"}));
    poisson->add_option("--out", out)->required();
    poisson->callback([&] { rc = cmd_poisson(rho_file, solver, tol, quadrature, out); });

    // initdata
    std::string kind = "canonical", file, report;
    double eps = 0.05, L = 20.0;
    std::size_t n = 4001;
    bool do_validate = false;
    double a_tol = 1e-6;
    auto* initdata = app.add_subcommand("initdata", "Sample initial data and check the admissibility conditions");
    initdata->add_option("--kind", kind)->check(CLI::IsMember({"canonical", "figure1", "file"}));
    initdata->add_option("--eps", eps);
    initdata->add_option("--file", file, "CSV with columns x, rho0, u0 (kind = file)");
    initdata->add_option("--L", L);
    initdata->add_option("--n", n);
    initdata->add_flag("--validate", do_validate);
    initdata->add_option("--report", report, "write the validation report as JSON");
    initdata->add_option("--out", out);
    auto* compute_a = initdata->add_subcommand("compute-A", "Compute the weight constant A");
    compute_a->add_option("--tol", a_tol);
    compute_a->callback([&] { rc = cmd_compute_a(a_tol); });
    initdata->callback([&] {
        if (initdata->got_subcommand(compute_a)) return;
        if (out.empty()) throw CLI::RequiredError("--out");
        rc = cmd_initdata(kind, eps, file, L, n, do_validate, report, out);
    });

    // simulate
    std::string init = "figure1";
    double wstop = 1e-3, snap_every = 0.0, label_r = 1.0, label_ell = 5.0;
    std::size_t per_decade = 10;
    bool modulation = false;
    std::vector<std::string> sets;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the Lagrangian solver until blow-up");
    simulate_cmd->add_option("--init", init)->check(CLI::IsMember({"canonical", "figure1", "file"}));
    simulate_cmd->add_option("--file", file);
    simulate_cmd->add_option("--eps", eps);
    simulate_cmd->add_option("--n", n);
    simulate_cmd->add_option("--L", L);
    simulate_cmd->add_option("--wstop", wstop);
    simulate_cmd->add_option("--snap-every", snap_every, "snapshot spacing in t (0: off)");
    simulate_cmd->add_option("--snaps-per-decade", per_decade, "snapshots per decade of min w (0: off)");
    simulate_cmd->add_option("--label-r", label_r);
    simulate_cmd->add_option("--label-ell", label_ell);
    simulate_cmd->add_flag("--modulation", modulation, "integrate the modulation ODEs alongside");
    simulate_cmd->add_option("--set", sets, "extra config key=value");
    simulate_cmd->add_option("--out", out)->required();
    simulate_cmd->callback([&] {
        ExperimentConfig c;
        c.preset = "simulate";
        c.kind = init;
        c.file = file;
        c.eps = eps;
        c.n = n;
        c.L = L;
        c.w_stop = wstop;
        c.t_every = snap_every;
        c.per_decade = per_decade;
        c.label_r = label_r;
        c.label_ell = label_ell;
        c.modulation = modulation;
        apply_sets(c, sets);
        rc = cmd_simulate(c, out);
    });

    // selfsim
    std::string run;
    double y_max = 50.0, M = kDefaultBootstrapM;
    std::size_t n_y = 2001;
    auto* selfsim = app.add_subcommand("selfsim", "Self-similar frames and bootstrap monitor for a modulated run");
    selfsim->add_option("--run", run)->required();
    selfsim->add_option("--ymax", y_max);
    selfsim->add_option("--ny", n_y);
    selfsim->add_option("--M", M);
    selfsim->add_option("--out", out)->required();
    selfsim->callback([&] { rc = cmd_selfsim(run, y_max, n_y, M, out); });

    // fit
    std::string betas;
    auto* fit = app.add_subcommand("fit", "Blow-up time, Holder rates and spatial profile of a run");
    fit->add_option("--run", run)->required();
    fit->add_option("--betas", betas, "comma-separated, default 1/3,1/2,2/3");
    fit->add_option("--out", out)->required();
    fit->callback([&] { rc = cmd_fit(run, betas, out); });

    // verify
    std::uint64_t seed = 7;
    std::size_t draws = 20;
    auto* verify = app.add_subcommand("verify", "Profile inequalities and transport checks");
    verify->require_subcommand(1);
    auto* ineq = verify->add_subcommand("inequalities");
    ineq->add_option("--out", out)->required();
    ineq->callback([&] { rc = cmd_verify_inequalities(out); });
    auto* transport = verify->add_subcommand("transport");
    transport->add_option("--seed", seed);
    transport->add_option("--draws", draws);
    transport->add_option("--out", out)->required();
    transport->callback([&] { rc = cmd_verify_transport(seed, draws, out); });

    // pe
    std::string v0 = "preset:gauss";
    double t_el = 0.9, a = -10.0, b = 10.0;
    auto* pe = app.add_subcommand("pe", "Exact pressureless Euler solution");
    pe->require_subcommand(1);
    auto* pe_exact = pe->add_subcommand("exact", "Sample the exact solution at elapsed time --t");
    pe_exact->add_option("--v0", v0);
    pe_exact->add_option("--t", t_el, "elapsed time since t0");
    pe_exact->add_option("--n", n);
    pe_exact->add_option("--a", a);
    pe_exact->add_option("--b", b);
    pe_exact->add_option("--out", out)->required();
    pe_exact->callback([&] { rc = cmd_pe_exact(v0, t_el, n, a, b, out); });
    auto* pe_life = pe->add_subcommand("lifespan");
    pe_life->add_option("--v0", v0);
    pe_life->callback([&] { rc = cmd_pe_lifespan(v0); });

    // run
    std::string preset, config_file;
    auto* run_cmd = app.add_subcommand("run", "initdata, validate, simulate, selfsim, fit, verify");
    run_cmd->add_option("--preset", preset)->check(CLI::IsMember(preset_names()));
    run_cmd->add_option("--config", config_file, "INI file; overrides the preset");
    run_cmd->add_option("--eps", eps, "shorthand for --set init.eps=...");
    run_cmd->add_option("--set", sets, "config key=value, applied last");
    run_cmd->add_option("--out", out);
    run_cmd->callback([&] {
        ExperimentConfig c = make_config(preset, config_file, sets);
        if (run_cmd->count("--eps")) c.eps = eps;
        rc = cmd_run(c, out);
    });

    // sweep
    std::string key, values;
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep = app.add_subcommand("sweep", "Independent runs over the values of one config key");
    sweep->add_option("--preset", preset)->check(CLI::IsMember(preset_names()));
    sweep->add_option("--config", config_file);
    sweep->add_option("--set", sets);
    sweep->add_option("--key", key)->required();
    sweep->add_option("--values", values)->required();
    sweep->add_option("--workers", workers);
    sweep->add_option("--out", out);
    sweep->callback([&] { rc = cmd_sweep(make_config(preset, config_file, sets), key, values, workers, out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return rc;
}
