#include "solab/scenario.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "solab/csv.hpp"
#include "solab/fourier.hpp"
#include "solab/numerics.hpp"
#include "solab/snapshot.hpp"

namespace solab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok |= (it.key() == k);
        if (!ok) throw error(std::string("config: unknown key '") + it.key() + "' in " + where);
    }
}

std::vector<double> as_vector(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json j = json::parse(json_text);
    check_keys(j, "root",
               {"scenario", "grid", "nonlinearity", "potential", "sigma0", "perturbation",
                "evolver", "horizon", "decompose_stride", "mu_interval", "tube_delta",
                "output_dir"});
    ScenarioConfig c;
    if (j.contains("scenario")) c.scenario = j["scenario"].get<std::string>();
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        check_keys(g, "grid", {"dim", "extent", "points"});
        c.grid = Grid(g.value("dim", 1), g.value("extent", 60.0), g.value("points", 2048));
    }
    if (j.contains("nonlinearity")) {
        const auto& n = j["nonlinearity"];
        check_keys(n, "nonlinearity", {"kind", "lambda", "s"});
        c.nl_kind = n.value("kind", "local_power");
        c.nl_lambda = n.value("lambda", 1.0);
        c.nl_s = n.value("s", 2.0);
    }
    if (j.contains("potential")) {
        const auto& p = j["potential"];
        check_keys(p, "potential",
                   {"kind", "h", "omega0", "drift", "delta", "omega", "cutoff_theta", "table"});
        c.pot_kind = p.value("kind", "zero");
        c.pot_h = p.value("h", 0.1);
        c.pot_omega0 = p.value("omega0", 1.0);
        if (p.contains("drift")) c.pot_drift = as_vector(p["drift"]);
        c.pot_delta = p.value("delta", 0.0);
        c.pot_omega = p.value("omega", 1.0);
        c.pot_cutoff_theta = p.value("cutoff_theta", 10.0);
        if (p.contains("table"))
            for (const auto& row : p["table"])
                c.pot_table.emplace_back(row.at("t").get<double>(),
                                         row.at("file").get<std::string>());
    }
    if (j.contains("sigma0")) {
        const auto& s = j["sigma0"];
        check_keys(s, "sigma0", {"a", "v", "gamma", "mu"});
        c.sigma0 = ModulationParams(as_vector(s.at("a")), as_vector(s.at("v")),
                                    s.value("gamma", 0.0), s.value("mu", 1.0));
    }
    if (j.contains("perturbation")) {
        const auto& p = j["perturbation"];
        check_keys(p, "perturbation", {"amplitude", "seed", "mode_cut"});
        c.perturb = true;
        c.perturb_amplitude = p.value("amplitude", 0.0);
        c.perturb_seed = p.value("seed", static_cast<std::uint64_t>(20210614));
        c.perturb_mode_cut = p.value("mode_cut", 6.0);
    }
    if (j.contains("evolver")) {
        const auto& e = j["evolver"];
        check_keys(e, "evolver", {"dt", "t_end", "snapshot_stride", "diag_stride"});
        c.evolver.dt = e.value("dt", 1e-3);
        c.evolver.t_end = e.value("t_end", 1.0);
        c.evolver.snapshot_stride = e.value("snapshot_stride", 50);
        c.evolver.diag_stride = e.value("diag_stride", 10);
    }
    if (j.contains("horizon")) {
        const auto& h = j["horizon"];
        check_keys(h, "horizon", {"rule", "constant"});
        c.horizon_rule = h.value("rule", "none");
        c.horizon_constant = h.value("constant", 2.0);
    }
    c.decompose_stride = j.value("decompose_stride", 1);
    if (j.contains("mu_interval")) {
        const auto iv = as_vector(j["mu_interval"]);
        if (iv.size() != 2) throw error("config: mu_interval must be [lo, hi]");
        c.mu_interval = {iv[0], iv[1]};
    }
    c.tube_delta = j.value("tube_delta", 0.3);
    c.output_dir = j.value("output_dir", std::string("out"));

    if (c.sigma0.dim() != c.grid.dim) throw error("config: sigma0 dimension != grid dim");
    if (c.evolver.dt <= 0.0) throw error("config: evolver.dt must be positive");
    if (c.decompose_stride < 1) throw error("config: decompose_stride must be >= 1");
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw error("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

std::string dump_config(const ScenarioConfig& c) {
    json j;
    j["scenario"] = c.scenario;
    j["grid"] = {{"dim", c.grid.dim}, {"extent", c.grid.extent}, {"points", c.grid.points}};
    j["nonlinearity"] = {{"kind", c.nl_kind}, {"lambda", c.nl_lambda}, {"s", c.nl_s}};
    json p = {{"kind", c.pot_kind},          {"h", c.pot_h},
              {"omega0", c.pot_omega0},      {"delta", c.pot_delta},
              {"omega", c.pot_omega},        {"cutoff_theta", c.pot_cutoff_theta}};
    if (!c.pot_drift.empty()) p["drift"] = c.pot_drift;
    if (!c.pot_table.empty()) {
        json tbl = json::array();
        for (const auto& [t, file] : c.pot_table) tbl.push_back({{"t", t}, {"file", file}});
        p["table"] = tbl;
    }
    j["potential"] = p;
    j["sigma0"] = {{"a", c.sigma0.a}, {"v", c.sigma0.v}, {"gamma", c.sigma0.gamma},
                   {"mu", c.sigma0.mu}};
    if (c.perturb)
        j["perturbation"] = {{"amplitude", c.perturb_amplitude},
                             {"seed", c.perturb_seed},
                             {"mode_cut", c.perturb_mode_cut}};
    j["evolver"] = {{"dt", c.evolver.dt},
                    {"t_end", c.evolver.t_end},
                    {"snapshot_stride", c.evolver.snapshot_stride},
                    {"diag_stride", c.evolver.diag_stride}};
    j["horizon"] = {{"rule", c.horizon_rule}, {"constant", c.horizon_constant}};
    j["decompose_stride"] = c.decompose_stride;
    j["mu_interval"] = {c.mu_interval.lo, c.mu_interval.hi};
    j["tube_delta"] = c.tube_delta;
    j["output_dir"] = c.output_dir;
    return j.dump(2) + "\n";
}

Nonlinearity make_nonlinearity(const ScenarioConfig& c) {
    if (c.nl_kind == "local_power")
        return Nonlinearity::local_power(c.nl_lambda, c.nl_s, c.grid.dim);
    if (c.nl_kind == "hartree") return Nonlinearity::hartree(c.nl_lambda, c.grid.dim);
    throw error("config: unknown nonlinearity kind " + c.nl_kind);
}

Potential make_potential(const ScenarioConfig& c) {
    if (c.pot_kind == "zero") return Potential::zero(c.grid.dim);
    if (c.pot_kind == "moving_trap") {
        auto drift = c.pot_drift;
        if (drift.empty()) drift.assign(c.grid.dim, 0.0);
        return Potential::moving_trap(c.grid.dim, c.pot_h, c.pot_omega0, drift,
                                      c.pot_cutoff_theta);
    }
    if (c.pot_kind == "mathieu_trap")
        return Potential::mathieu_trap(c.grid.dim, c.pot_h, c.pot_omega0, c.pot_delta,
                                       c.pot_omega, c.pot_cutoff_theta);
    if (c.pot_kind == "tabulated") {
        std::vector<PotentialTableSlice> slices;
        for (const auto& [t, file] : c.pot_table) {
            Snapshot snap = read_snapshot(file);
            slices.push_back({t, std::move(snap.field)});
        }
        return Potential::tabulated(std::move(slices));
    }
    throw error("config: unknown potential kind " + c.pot_kind);
}

double effective_horizon(const ScenarioConfig& c) {
    double t = c.evolver.t_end;
    if (c.horizon_rule == "theorem")
        t = std::min(t, c.horizon_constant * std::abs(std::log(c.pot_h)) / c.pot_h);
    else if (c.horizon_rule == "inverse")
        t = std::min(t, c.horizon_constant / c.pot_h);
    else if (c.horizon_rule != "none")
        throw error("config: unknown horizon rule " + c.horizon_rule);
    return t;
}

ComplexField make_perturbation(const ScenarioConfig& c, const ProfileLibrary& library,
                               double mu) {
    const Grid& g = c.grid;
    RandomStream rng(c.perturb_seed);
    // band-limited Gaussian modes with smooth spectral decay
    std::vector<cplx> hat(g.size(), cplx{0.0, 0.0});
    const double kc = c.perturb_mode_cut;
    for (std::size_t p = 0; p < hat.size(); ++p) {
        const auto idx = g.unravel(p);
        double k2 = 0.0;
        for (int d = 0; d < g.dim; ++d) {
            const double k = g.wavenumber(idx[d]);
            k2 += k * k;
        }
        if (k2 > kc * kc) continue;
        const double amp = std::exp(-2.0 * k2 / (kc * kc));
        hat[p] = cplx{rng.normal(), rng.normal()} * amp;
    }
    fft_backward(g, hat);
    ComplexField w(g, std::move(hat));
    // localize around the soliton so the tube condition holds at the seam
    const double sigma2 = std::pow(g.extent / 12.0, 2);
    for (std::size_t p = 0; p < w.size(); ++p) {
        const auto idx = g.unravel(p);
        double r2 = 0.0;
        for (int d = 0; d < g.dim; ++d) {
            const double x = g.coord(idx[d]);
            r2 += x * x;
        }
        w[p] *= std::exp(-r2 / sigma2);
    }

    auto entry = library.get(mu);
    w = project_skew_orthogonal(w, entry->basis);
    const double n = std::sqrt(h1_norm_sq(w));
    if (n == 0.0) throw error("make_perturbation: degenerate perturbation");
    double target = c.perturb_amplitude > 0.0 ? c.perturb_amplitude : 0.5 * c.pot_h;
    return (target / n) * w;
}

namespace {

void write_plot_script(const std::string& path, int dim) {
    std::ofstream os(path);
    os << "# gnuplot script for soliton-lab artifacts\n"
       << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set terminal pngcairo size 1200,800\n"
       << "set output 'tracking.png'\n"
       << "plot 'decomposition.csv' using 1:2 with lines title 'a_1 (PDE)', \\\n"
       << "     'effective.csv' using 1:2 with lines title 'a_1 (effective)'\n"
       << "set output 'fluctuation.png'\n"
       << "plot 'decomposition.csv' using 1:" << (2 * dim + 3)
       << " with lines title 'w_h1'\n"
       << "set output 'diagnostics.png'\n"
       << "plot 'diagnostics.csv' using 1:2 with lines title 'charge', \\\n"
       << "     'diagnostics.csv' using 1:" << (3 + dim) << " with lines title 'energy'\n";
}

json artifacts_to_json(const RunArtifacts& a, const ScenarioConfig& c, bool aborted,
                       const std::string& abort_reason, bool stride_warning,
                       bool sampling_warning, bool tube_warning) {
    json s;
    s["scenario"] = c.scenario;
    s["h"] = c.pot_h;
    s["t_end_effective"] = a.t_end_effective;
    s["max_tracking_error"] = a.max_tracking_error;
    s["sup_w_h1"] = a.sup_w_h1;
    s["sup_alpha"] = a.sup_alpha;
    s["mu_drift"] = a.mu_drift;
    s["warnings"] = {{"evolver_aborted", aborted},
                     {"abort_reason", abort_reason},
                     {"diagnostics_stride", stride_warning},
                     {"alpha_sampling", sampling_warning},
                     {"tube_exceeded", tube_warning}};
    if (!a.error.empty()) s["error"] = a.error;
    return s;
}

}  // namespace

RunArtifacts run_scenario(const ScenarioConfig& config) {
    RunArtifacts art;
    art.output_dir = config.output_dir;
    fs::create_directories(config.output_dir);
    const auto in_dir = [&](const std::string& name) {
        return (fs::path(config.output_dir) / name).string();
    };
    art.config_path = in_dir("config.json");
    art.diagnostics_csv = in_dir("diagnostics.csv");
    art.decomposition_csv = in_dir("decomposition.csv");
    art.effective_csv = in_dir("effective.csv");
    art.summary_json = in_dir("summary.json");
    art.plot_script = in_dir("plot.gp");

    // echo the effective config first so partial runs keep their provenance
    {
        std::ofstream os(art.config_path);
        os << dump_config(config);
    }
    write_plot_script(art.plot_script, config.grid.dim);

    bool aborted = false, stride_warning = false, sampling_warning = false, tube_warning = false;
    std::string abort_reason;
    const int dim = config.grid.dim;

    try {
        const Nonlinearity nl = make_nonlinearity(config);
        const Potential pot = make_potential(config);
        const NlsModel model{nl, pot};
        ProfileLibrary library(nl, config.grid);
        DecomposeOptions dopts;
        dopts.tube_delta = config.tube_delta;

        EvolverConfig evolver = config.evolver;
        evolver.t_end = effective_horizon(config);
        art.t_end_effective = evolver.t_end;

        // initial data psi0 = T_{sigma0}(eta + w0), ||w0||_H1 < h
        auto entry0 = library.get(config.sigma0.mu);
        ComplexField u0 = entry0->profile.eta;
        if (config.perturb) u0 = u0 + make_perturbation(config, library, config.sigma0.mu);
        const ComplexField psi0 = apply_transform(u0, config.sigma0.transform());

        const bool empty_run = evolver.t_end <= 0.0;
        RunResult pde;
        EffectiveTrajectory eff;
        if (!empty_run) {
            pde = run(psi0, model, evolver);
            aborted = pde.aborted;
            abort_reason = pde.abort_reason;
            stride_warning = pde.diagnostics.stride_warning;
            eff = integrate_effective({config.sigma0, 0.0}, pot, evolver.dt, evolver.t_end,
                                      config.mu_interval);
        }
        write_diagnostics_csv(art.diagnostics_csv, pde.diagnostics, dim);

        // decompose every decompose_stride-th snapshot
        std::vector<DecompositionSample> dec_series;
        std::vector<double> dec_times;
        std::vector<ModulationParams> dec_sigmas;
        ModulationParams guess = config.sigma0;
        for (std::size_t i = 0; i < pde.snapshots.times.size();
             i += static_cast<std::size_t>(config.decompose_stride)) {
            DecompositionSample smp;
            smp.t = pde.snapshots.times[i];
            smp.decomposition = skew_project(pde.snapshots.fields[i], guess, library, dopts);
            guess = smp.decomposition.sigma;
            tube_warning |= smp.decomposition.tube_warning;
            smp.lyapunov = lyapunov_value(smp.decomposition, library);
            dec_times.push_back(smp.t);
            dec_sigmas.push_back(smp.decomposition.sigma);
            dec_series.push_back(std::move(smp));
        }
        if (dec_series.size() >= 3) {
            const AlphaSeries alpha = alpha_from_trajectory(dec_times, dec_sigmas, pot);
            sampling_warning = alpha.sampling_warning;
            for (std::size_t i = 0; i < dec_series.size(); ++i)
                dec_series[i].alpha = alpha.samples[i].alpha;
        }
        write_decomposition_csv(art.decomposition_csv, dec_series, dim);

        // effective trajectory sampled at the decomposition times
        EffectiveTrajectory eff_sampled;
        for (double t : dec_times) {
            const std::size_t k = static_cast<std::size_t>(std::lround(t / evolver.dt));
            if (k < eff.states.size()) eff_sampled.states.push_back(eff.states[k]);
        }
        write_trajectory_csv(art.effective_csv, eff_sampled);

        for (std::size_t i = 0; i < dec_series.size() && i < eff_sampled.states.size(); ++i) {
            double track = 0.0;
            for (int d = 0; d < dim; ++d)
                track = std::max(track, std::abs(dec_series[i].decomposition.sigma.a[d] -
                                                 eff_sampled.states[i].sigma.a[d]));
            art.max_tracking_error = std::max(art.max_tracking_error, track);
            art.sup_w_h1 = std::max(art.sup_w_h1, dec_series[i].decomposition.w_h1);
            art.mu_drift = std::max(
                art.mu_drift, std::abs(dec_series[i].decomposition.sigma.mu - config.sigma0.mu));
            double amax = 0.0;
            for (double v : dec_series[i].alpha) amax = std::max(amax, std::abs(v));
            art.sup_alpha = std::max(art.sup_alpha, amax);
        }
    } catch (const std::exception& ex) {
        art.error = ex.what();
    }

    {
        std::ofstream os(art.summary_json);
        os << artifacts_to_json(art, config, aborted, abort_reason, stride_warning,
                                sampling_warning, tube_warning)
                  .dump(2)
           << "\n";
    }
    return art;
}

ScalingStudy h_scaling_study(const ScenarioConfig& base, const std::vector<double>& h_list,
                             int threads) {
    if (h_list.size() < 3) throw error("h_scaling_study: need >= 3 values of h");
    ScalingStudy study;
    study.h_values = h_list;

    std::vector<ScenarioConfig> configs;
    for (double h : h_list) {
        ScenarioConfig c = base;
        c.pot_h = h;
        c.perturb = true;
        c.perturb_amplitude = 0.5 * h;
        char tag[32];
        std::snprintf(tag, sizeof(tag), "h_%g", h);
        c.output_dir = (fs::path(base.output_dir) / tag).string();
        configs.push_back(std::move(c));
    }

    study.runs.resize(configs.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) {
            study.runs[i] = run_scenario(configs[i]);
            if (!study.runs[i].error.empty()) {
                study.runs.resize(i + 1);
                break;
            }
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < configs.size();
                     i = next.fetch_add(1))
                    study.runs[i] = run_scenario(configs[i]);
            });
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < study.runs.size(); ++i) {
        if (!study.runs[i].error.empty()) {
            study.error = "run failed for h = " + std::to_string(h_list[i]) + ": " +
                          study.runs[i].error;
            study.runs.resize(i + 1);
            break;
        }
    }

    json s;
    s["h"] = study.h_values;
    json rows = json::array();
    for (const auto& r : study.runs)
        rows.push_back({{"output_dir", r.output_dir},
                        {"sup_w_h1", r.sup_w_h1},
                        {"sup_alpha", r.sup_alpha},
                        {"max_tracking_error", r.max_tracking_error}});
    s["runs"] = rows;
    if (study.error.empty() && study.runs.size() == h_list.size()) {
        std::vector<double> lx, lw, la;
        for (std::size_t i = 0; i < h_list.size(); ++i) {
            lx.push_back(std::log(h_list[i]));
            lw.push_back(std::log(study.runs[i].sup_w_h1));
            la.push_back(std::log(study.runs[i].sup_alpha));
        }
        const LineFit fw = fit_line(lx, lw);
        const LineFit fa = fit_line(lx, la);
        study.slope_w_h1 = fw.slope;
        study.slope_alpha = fa.slope;
        study.slope_w_residual = fw.residual_rms;
        study.slope_alpha_residual = fa.residual_rms;
        s["slope_w_h1"] = fw.slope;
        s["slope_w_h1_residual"] = fw.residual_rms;
        s["slope_alpha"] = fa.slope;
        s["slope_alpha_residual"] = fa.residual_rms;
    } else if (!study.error.empty()) {
        s["error"] = study.error;
    }

    fs::create_directories(base.output_dir);
    const std::string path = (fs::path(base.output_dir) / "scaling_summary.json").string();
    std::ofstream os(path);
    os << s.dump(2) << "\n";
    study.summary_json = path;
    return study;
}

ReportResult report_artifacts(const std::string& output_dir) {
    ReportResult rep;
    const fs::path dir(output_dir);
    const CsvTable dec = read_csv((dir / "decomposition.csv").string());
    const CsvTable eff = read_csv((dir / "effective.csv").string());

    // infer dimension from the alpha columns: columns = 1 + 2N + 4 + (2N+2) + 1
    int dim = 0;
    for (const auto& cname : dec.columns)
        if (cname.rfind("a_", 0) == 0) ++dim;

    for (std::size_t i = 0; i < dec.rows.size() && i < eff.rows.size(); ++i) {
        for (int d = 0; d < dim; ++d) {
            const double apde = dec.rows[i][1 + d];
            const double aeff = eff.rows[i][1 + d];
            rep.max_tracking_error = std::max(rep.max_tracking_error, std::abs(apde - aeff));
        }
        rep.sup_w_h1 = std::max(rep.sup_w_h1, dec.rows[i][dec.column_index("w_h1")]);
        for (int k = 1; k <= 2 * dim + 2; ++k) {
            const int col = dec.column_index("alpha_" + std::to_string(k));
            rep.sup_alpha = std::max(rep.sup_alpha, std::abs(dec.rows[i][col]));
        }
    }

    std::ifstream is((dir / "summary.json").string());
    if (is) {
        std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
        rep.summary_json_text = text;
        const json s = json::parse(text);
        auto close = [](double a, double b) {
            return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
        };
        rep.matches_summary = close(s.value("max_tracking_error", -1.0), rep.max_tracking_error) &&
                              close(s.value("sup_w_h1", -1.0), rep.sup_w_h1) &&
                              close(s.value("sup_alpha", -1.0), rep.sup_alpha);
    }
    return rep;
}

}  // namespace solab
