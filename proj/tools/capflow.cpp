// Command-line driver: run / check-identities / check-inequalities /
// convergence-study / sweep.
//
// Exit codes: 0 = converged or all checks passed, 1 = not converged,
// aborted or a failed check, 2 = usage or configuration error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "capflow/io.hpp"
#include "capflow/studies.hpp"

namespace fs = std::filesystem;
using namespace capflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

fs::path resolve_out(const CommonOptions& o, const std::string& fallback) {
    if (!o.out_dir.empty()) return o.out_dir;
    if (const char* env = std::getenv("CAPFLOW_OUT"); env && *env) return env;
    return fallback;
}

std::string config_text(const CommonOptions& o, bool required) {
    if (o.config_path.empty()) {
        if (required) throw ConfigError("--config is required for this subcommand");
        return "";
    }
    return read_text_file(o.config_path);
}

double degrees(double rad) { return rad * 180.0 / std::numbers::pi; }

std::string theta_dir_name(double theta) {
    std::ostringstream s;
    s << "theta_" << std::round(degrees(theta) * 1000.0) / 1000.0;
    return s.str();
}

nlohmann::json run_summary(const FlowConfig& c, const RunResult& r) {
    const auto& m = r.final_state.monitors;
    if (r.reports.empty()) return {{"status", to_string(r.status)}, {"message", r.message}};
    const FunctionalReport& last = r.reports.back();
    const ReferenceConstants rc = reference_constants(c.theta, c.n);
    const double r_pred = std::pow(r.initial_report.V[0] / rc.b_theta, 1.0 / (c.n + 1));
    return {{"status", to_string(r.status)},
            {"message", r.message},
            {"theta_deg", degrees(c.theta)},
            {"steps", r.final_state.step},
            {"t", r.final_state.t},
            {"max_F", last.max_F},
            {"volume_drift", m.run_max_volume_drift},
            {"increase_events", m.increase_events},
            {"run_min_u", m.run_min_u},
            {"c0_estimate", r.c0_estimate},
            {"run_min_kappa", m.run_min_kappa},
            {"initial_min_kappa", r.baseline.min_kappa},
            {"run_max_H", m.run_max_H},
            {"initial_max_H", r.baseline.max_H},
            {"r_fit", last.fitted_cap.r},
            {"rms_fit", last.fitted_cap.rms},
            {"r_predicted", r_pred},
            {"dmu_ubar", r.final_boundary.dmu_ubar},
            {"dmu_H", r.final_boundary.dmu_H},
            {"initial_bc_compatible", r.initial_bc_compatible}};
}

// Runs one flow configuration and writes its CSV, snapshots, verdicts and
// manifest into dir.  Returns the run status.
RunStatus run_to_directory(const FlowConfig& c, const std::string& echo, const fs::path& dir, bool quiet,
                           const std::string& command) {
    fs::create_directories(dir);
    RunManifest manifest;
    manifest.command = command;
    manifest.config_echo = echo;
    manifest.start_time = utc_timestamp();
    const Grid grid = build_grid(c.mode, c.n, c.n_beta, c.n_alpha);
    manifest.grid = describe_grid(grid);

    RadialGraph initial{grid, initial_phi(grid, c.theta, c.initial, c.seed), c.theta};
    write_snapshot(dir / "initial.snapshot", initial, 0.0);
    VerdictWriter verdicts(dir / "verdicts.jsonl");

    const RunObserver observer = [&](const FlowState& s, const FunctionalReport& rep) {
        if (!quiet)
            std::cerr << "[" << theta_dir_name(c.theta) << "] step " << s.step << " t=" << rep.t
                      << " max|F|=" << rep.max_F << " V0=" << format_double(rep.V[0]) << "\n";
    };
    const RunResult r = run_from(c, std::move(initial), observer);

    if (!r.reports.empty()) write_timeseries(dir / "timeseries.csv", r.reports, c.n);
    write_snapshot(dir / "final.snapshot", r.final_state.rg, r.final_state.t);

    const nlohmann::json summary = run_summary(c, r);
    verdicts.write(to_json(Verdict{"run", r.status == RunStatus::Converged, summary}));
    if (!r.initial_bc_compatible)
        verdicts.write(to_json(Verdict{"initial_bc_compatible", false,
                                       {{"note", "initial data violate the capillary condition"}}}));

    manifest.end_time = utc_timestamp();
    manifest.status = to_string(r.status);
    manifest.files = {"initial.snapshot", "final.snapshot", "timeseries.csv", "verdicts.jsonl"};
    write_manifest(dir / "manifest.txt", manifest);

    if (!quiet) std::cout << summary.dump() << "\n";
    return r.status;
}

int cmd_run(const CommonOptions& o) {
    const std::string text = config_text(o, true);
    FlowConfig c = parse_config(text);
    if (o.seed) c.seed = *o.seed;
    const RunStatus s = run_to_directory(c, text, resolve_out(o, "capflow_out"), o.quiet, "run");
    return s == RunStatus::Converged ? kExitOk : kExitFail;
}

int cmd_sweep(const CommonOptions& o) {
    const std::string text = config_text(o, true);
    SweepConfig sc = parse_sweep_config(text);
    if (o.seed) sc.flow.seed = *o.seed;
    const fs::path out = resolve_out(o, "capflow_out");
    std::vector<RunStatus> status(sc.thetas.size(), RunStatus::Aborted);
    std::vector<std::string> errors(sc.thetas.size());
    // Independent configurations run concurrently; each owns its directory.
#pragma omp parallel for schedule(dynamic)
    for (std::size_t i = 0; i < sc.thetas.size(); ++i) {
        FlowConfig c = sc.flow;
        c.theta = sc.thetas[i];
        try {
            std::ostringstream echo;
            echo << text << "\n# sweep member: theta = " << format_double(c.theta) << " rad\n";
            status[i] = run_to_directory(c, echo.str(), out / theta_dir_name(c.theta), o.quiet, "sweep");
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    int code = kExitOk;
    for (std::size_t i = 0; i < status.size(); ++i) {
        if (!errors[i].empty()) {
            std::cerr << "sweep member " << theta_dir_name(sc.thetas[i]) << " failed: " << errors[i] << "\n";
            code = kExitFail;
        } else if (status[i] != RunStatus::Converged) {
            code = kExitFail;
        }
    }
    return code;
}

int cmd_study(const CommonOptions& o, const std::string& name) {
    const std::string text = config_text(o, false);
    StudyConfig c = parse_study_config(text, name);
    if (o.seed) c.seed = *o.seed;
    const fs::path dir = resolve_out(o, "capflow_out");
    fs::create_directories(dir);
    RunManifest manifest;
    manifest.command = name;
    manifest.config_echo = text;
    manifest.start_time = utc_timestamp();
    manifest.grid = describe_grid(build_grid(c.mode, c.n, c.n_beta, c.n_alpha));

    VerdictWriter writer(dir / "verdicts.jsonl");
    const VerdictSink sink = [&](const Verdict& v) {
        writer.write(to_json(v));
        if (!o.quiet && !v.pass) std::cerr << "FAIL " << to_json(v).dump() << "\n";
    };
    StudyResult result;
    if (name == "check-identities")
        result = check_identities(c, sink);
    else if (name == "check-inequalities")
        result = check_inequalities(c, sink);
    else
        result = convergence_study(c, sink);

    manifest.end_time = utc_timestamp();
    manifest.status = result.pass() ? "pass" : "fail";
    manifest.files = {"verdicts.jsonl"};
    write_manifest(dir / "manifest.txt", manifest);
    if (!o.quiet)
        std::cout << name << ": " << result.verdicts.size() - result.failures() << "/" << result.verdicts.size()
                  << " checks passed\n";
    return result.pass() ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capflow: capillary curvature flow of star-shaped radial graphs"};
    app.require_subcommand(1);
    CommonOptions opts;
    std::uint64_t seed = 0;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "Config file (key = value lines)");
        sub->add_option("--out", opts.out_dir, "Output directory (default: $CAPFLOW_OUT or ./capflow_out)");
        sub->add_option("--seed", seed, "Seed of the perturbation RNG");
        sub->add_flag("--quiet", opts.quiet, "Suppress progress output");
    };
    CLI::App* run = app.add_subcommand("run", "Evolve one configuration until convergence or t_max");
    CLI::App* ids = app.add_subcommand("check-identities", "Minkowski identities on random capillary graphs");
    CLI::App* ineq = app.add_subcommand("check-inequalities", "Isoperimetric, Alexandrov-Fenchel and Minkowski inequalities");
    CLI::App* conv = app.add_subcommand("convergence-study", "Spatial and temporal orders of accuracy");
    CLI::App* sweep = app.add_subcommand("sweep", "Run one configuration for a list of contact angles");
    for (CLI::App* sub : {run, ids, ineq, conv, sweep}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    for (CLI::App* sub : {run, ids, ineq, conv, sweep})
        if (sub->count("--seed")) opts.seed = seed;

    try {
        if (*run) return cmd_run(opts);
        if (*sweep) return cmd_sweep(opts);
        if (*ids) return cmd_study(opts, "check-identities");
        if (*ineq) return cmd_study(opts, "check-inequalities");
        if (*conv) return cmd_study(opts, "convergence-study");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
