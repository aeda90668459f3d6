#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dshock/diagnostics.hpp"
#include "dshock/initdata.hpp"
#include "dshock/io.hpp"
#include "dshock/lagrangian_solver.hpp"
#include "dshock/selfsimilar_frame.hpp"

// End-to-end experiments: initdata -> validate -> simulate -> selfsim -> fit
// -> verify, with every artifact listed in manifest.json.

namespace dshock {

struct ExperimentConfig {
    std::string preset = "custom";
    // [init] kind: canonical | figure1 | file | pe:gauss | pe:sech | pe:profile
    std::string kind = "figure1";
    double eps = 0.05;
    std::string file;  // CSV with columns x, rho0, u0 for kind = file
    // [grid]
    double L = 20.0;
    std::size_t n = 4001;
    double label_r = 1.0;  // LabelMap concentration; 1 is uniform
    double label_ell = 5.0;
    // [solver]
    double dt_max = 1e-2;
    double c_cfl = 0.07;
    double w_stop = 1e-3;
    double newton_tol = 1e-13;
    double t_max = 10.0;
    std::size_t max_steps = 200000;
    // [snapshots]
    std::size_t per_decade = 10;  // per decade of min w; 0 disables
    double t_every = 0.0;         // spacing in t; 0 disables
    double s_every = 0.0;         // spacing in s for modulated runs; 0 disables
    double halfwidth = 0.0;       // keep |x - center| <= halfwidth (center xi, else x_argmin); 0 keeps all
    // [frame]
    bool modulation = false;
    double y_max = 50.0;
    std::size_t n_y = 2001;
    double M = kDefaultBootstrapM;
    double guard = kDefaultModulationGuard;
    // [diagnostics]
    std::vector<double> betas{1.0 / 3.0, 0.5, 2.0 / 3.0};
    std::size_t exclude_last = 3;
    double decades = 1.0;
    std::size_t min_points = 8;
    std::size_t min_pair_span = kHolderMinPairSpan;
    double rho_floor = 20.0;
    double inner_factor = 10.0;
    // [verify]
    bool inequalities = true;
    std::size_t transport_draws = 20;  // 0 skips the transport checks
    std::uint64_t seed = 7;
    // [output]
    std::string out;  // empty: <output root>/<preset>

    bool pressureless() const { return kind.rfind("pe:", 0) == 0; }
};

// figure1 | canonical | pe-gauss | pe-sech
ExperimentConfig preset_config(const std::string& name);
std::vector<std::string> preset_names();

// Throws UsageError naming the offending "section.key".
void validate_config(const ExperimentConfig& c);

// Keys are "section.key", as in the INI file.
void set_config_value(ExperimentConfig& c, const std::string& key, const std::string& value);
std::vector<std::string> config_keys();
std::string to_ini(const ExperimentConfig& c);
// Values from the file override those of base.
ExperimentConfig load_config(const std::filesystem::path& ini, ExperimentConfig base = {});

// $DSHOCK_OUTPUT_ROOT, or ./runs when unset.
std::filesystem::path output_root();
std::filesystem::path output_dir(const ExperimentConfig& c);

InitialData build_initial_data(const ExperimentConfig& c);

struct SnapshotRecord {
    std::size_t index = 0;
    double t = 0.0;
    double min_w = 1.0;
    double x_argmin = 0.0;
    FieldSnapshot fields;
    std::vector<double> alpha, w;
    // x and u rebuilt from the carried hierarchy, anchored at the collapsing
    // particle; used by the blow-up fits.
    std::vector<double> x_map, u_map;
    std::optional<ModulationState> mod;
};

struct SimulationOutput {
    std::vector<StepInfo> steps;
    BlowupEvent event;
    std::vector<SnapshotRecord> snapshots;
    std::vector<ModulationState> modulation;  // after each accepted step
};

SimulationOutput simulate(const ExperimentConfig& c, const InitialData& data);

// Run directory layout: steps.csv, events.json, snapshots.csv (index),
// snapshots/snap_NNNN.csv, modulation.csv.
void write_simulation(io::ArtifactLog& log, const SimulationOutput& sim);
SimulationOutput load_simulation(const std::filesystem::path& run_dir);

struct FrameSeries {
    std::vector<SelfSimilarFrame> frames;
    std::vector<BootstrapMonitor> monitors;
    std::vector<bool> resolved;  // sampled densely enough and not truncated
    double s_resolved_end = 0.0;
    FitResult tau_dot_decay;  // log|tau_dot| vs s over the final resolved decade
    std::vector<std::string> warnings;
};

// Frames for every snapshot that carries a modulation state.
FrameSeries selfsim_frames(const SimulationOutput& sim, double y_max, std::size_t n_y, double A, double M);
// frames/frame_NNNN.csv and monitor.csv.
void write_frames(io::ArtifactLog& log, const FrameSeries& fs);

struct FitSettings {
    std::vector<double> betas{1.0 / 3.0, 0.5, 2.0 / 3.0};
    FitWindowOptions window;
    SpatialFitOptions spatial;
    std::size_t min_pair_span = kHolderMinPairSpan;
};
FitSettings fit_settings(const ExperimentConfig& c);

// Blow-up time and location from the event (w linear in t at the collapsing
// label), the 1/max|u_x| fit, temporal Holder fits on snapshots whose
// maximizing pairs are resolved, and the spatial fit on the last snapshot.
// Holder and spatial fits use the rebuilt x_map, u_map.
// Fit failures become warnings.
BlowupReport fit_blowup(const SimulationOutput& sim, const FitSettings& s);

struct EnergyDrift {
    double H0 = 0.0;
    double max_rel_drift = 0.0;  // over records with min w >= 10 w_stop
    std::size_t records = 0;
};
EnergyDrift energy_drift(const SimulationOutput& sim, double w_stop);

struct StageStatus {
    std::string name;
    std::string status;  // ok | skipped | failed
    std::string detail;
};

struct ExperimentOutcome {
    int exit_code = 0;
    std::filesystem::path dir;
    io::json manifest;
    std::vector<StageStatus> stages;
    SimulationOutput sim;
    std::optional<FrameSeries> frames;
    std::optional<BlowupReport> report;
    std::optional<AdmissibilityReport> admissibility;
    EnergyDrift energy;
};

// Config validation errors throw before anything is written. Stage errors
// are recorded in the manifest and give exit code 1.
ExperimentOutcome run_experiment(const ExperimentConfig& c);

}  // namespace dshock
