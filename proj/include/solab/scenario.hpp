#pragma once

#include <string>
#include <vector>

#include "solab/decompose.hpp"
#include "solab/evolve.hpp"

namespace solab {

/// Declarative experiment description. Parsed from a JSON config file; unknown
/// keys are rejected and the effective config (defaults filled in) is echoed
/// into the output directory.
struct ScenarioConfig {
    std::string scenario = "custom";  // free_soliton | static_trap | adiabatic_transport |
                                      // mathieu | h_scaling | custom
    Grid grid{1, 60.0, 2048};
    std::string nl_kind = "local_power";
    double nl_lambda = 1.0;
    double nl_s = 2.0;

    std::string pot_kind = "zero";  // zero | moving_trap | mathieu_trap | tabulated
    double pot_h = 0.1;
    double pot_omega0 = 1.0;
    std::vector<double> pot_drift;
    double pot_delta = 0.0;
    double pot_omega = 1.0;
    double pot_cutoff_theta = 10.0;
    std::vector<std::pair<double, std::string>> pot_table;  // (t, snapshot path)

    ModulationParams sigma0{{0.0}, {0.0}, 0.0, 1.0};

    bool perturb = false;
    double perturb_amplitude = 0.0;  // absolute ||w0||_H1; 0 means 0.5 * h
    std::uint64_t perturb_seed = 20210614;
    double perturb_mode_cut = 6.0;

    EvolverConfig evolver;
    std::string horizon_rule = "none";  // none | theorem (C |log h|/h) | inverse (C/h)
    double horizon_constant = 2.0;

    int decompose_stride = 1;  // snapshots between decompositions
    MuInterval mu_interval;
    double tube_delta = 0.3;

    std::string output_dir = "out";
};

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
std::string dump_config(const ScenarioConfig& config);  // canonical JSON echo

Nonlinearity make_nonlinearity(const ScenarioConfig& config);
Potential make_potential(const ScenarioConfig& config);

/// Effective horizon min(t_end, rule(h)).
double effective_horizon(const ScenarioConfig& config);

/// Seeded band-limited random field, projected skew-orthogonal to the tangent
/// space at mu and H1-normalized (the Theorem-compliant initial fluctuation).
ComplexField make_perturbation(const ScenarioConfig& config, const ProfileLibrary& library,
                               double mu);

struct RunArtifacts {
    std::string output_dir;
    std::string config_path;
    std::string diagnostics_csv;
    std::string decomposition_csv;
    std::string effective_csv;
    std::string summary_json;
    std::string plot_script;

    // headline numbers, mirrored in summary_json
    double max_tracking_error = 0.0;
    double sup_w_h1 = 0.0;
    double sup_alpha = 0.0;
    double mu_drift = 0.0;
    double t_end_effective = 0.0;
    std::string error;  // empty on success
};

RunArtifacts run_scenario(const ScenarioConfig& config);

struct ScalingStudy {
    std::vector<double> h_values;
    std::vector<RunArtifacts> runs;
    double slope_w_h1 = 0.0;
    double slope_alpha = 0.0;
    double slope_w_residual = 0.0;
    double slope_alpha_residual = 0.0;
    std::string summary_json;
    std::string error;
};

/// For each h: perturbation 0.5 h, horizon per the config rule, then log-log
/// least squares of sup_t ||w||_H1 and sup_t |alpha| against h. Runs are
/// independent single-writer jobs, so threads > 1 changes scheduling only,
/// never the emitted bytes.
ScalingStudy h_scaling_study(const ScenarioConfig& base, const std::vector<double>& h_list,
                             int threads = 1);

/// Recompute summary quantities from the emitted CSVs (independent of the
/// in-memory path that produced them).
struct ReportResult {
    double max_tracking_error = 0.0;
    double sup_w_h1 = 0.0;
    double sup_alpha = 0.0;
    bool matches_summary = false;
    std::string summary_json_text;
};
ReportResult report_artifacts(const std::string& output_dir);

}  // namespace solab
