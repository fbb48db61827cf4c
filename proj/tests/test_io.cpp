#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "capflow/io.hpp"
#include "capflow/studies.hpp"

using namespace capflow;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("capflow_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
    return out;
}

// Runs the CLI and returns its exit status.
int run_cli(const std::string& args) {
    const std::string cmd = std::string(CAPFLOW_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("parse_config: hemisphere run config") {
    const FlowConfig c = parse_config("theta = 90 deg; mode = axisym; n = 2; n_beta = 128; initial = cap r=1");
    CHECK(c.theta == pi / 2);
    CHECK(c.mode == Mode::Axisym);
    CHECK(c.n == 2);
    CHECK(c.n_beta == 128);
    CHECK(c.n_alpha == 1);
    CHECK(c.initial.kind == "cap");
    CHECK(c.initial.r == 1.0);
    CHECK(c.dt_safety == 0.4);
    CHECK(c.stop_tol == 1e-7);
    CHECK(c.t_max == 50.0);
    CHECK(c.mono_tol == 1e-8);
    CHECK(c.volume_tol == 1e-4);
}

TEST_CASE("parse_config: multi-line text, radians and comments") {
    const FlowConfig c = parse_config(
        "# a Full2D run\n"
        "theta = 1.0471975511965976 rad\n"
        "mode = full2d   # square grid\n"
        "n_beta = 48\n"
        "n_alpha = 64\n"
        "initial = perturbed r=1.5 eps=0.05 shape=5\n"
        "dt_safety = 0.25\n"
        "seed = 99\n");
    CHECK(c.theta == doctest::Approx(pi / 3).epsilon(1e-16));
    CHECK(c.mode == Mode::Full2D);
    CHECK(c.n_alpha == 64);
    CHECK(c.initial.kind == "perturbed");
    CHECK(c.initial.r == 1.5);
    CHECK(c.initial.eps == 0.05);
    CHECK(c.initial.shape == 5);
    CHECK(c.dt_safety == 0.25);
    CHECK(c.seed == 99);
    CHECK(parse_config("theta = 60 deg; mode = full2d").n_alpha == 32);
}

TEST_CASE("parse_config: errors") {
    auto message = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("theta = 200 deg") == "theta out of (0, pi)");
    CHECK(message("theta = 0 deg") == "theta out of (0, pi)");
    CHECK(message("n_beta = 64").find("theta") != std::string::npos);
    CHECK(message("theta = 60") != "no error");            // unit is mandatory
    CHECK(message("theta = 60 deg; colour = red") != "no error");  // unknown key
    CHECK(message("theta = 60 deg; theta = 30 deg") != "no error");  // duplicate key
    CHECK(message("theta = 60 deg; n_beta = -8") != "no error");
    CHECK(message("theta = 60 deg; mode = full2d; n = 3") != "no error");
    CHECK(message("theta = 60 deg; dt_safety = 0") != "no error");
    CHECK(message("theta = 60 deg; stop_tol = 0") != "no error");
    CHECK(message("theta = 60 deg; initial = blob") != "no error");
    CHECK(message("theta = 60 deg; initial = perturbed shape=5") != "no error");  // needs full2d
    CHECK(message("theta = 60 deg; n_alpha = 16") != "no error");               // axisym has no alpha
    CHECK(message("theta = 60 deg; mode = full2d; n_alpha = 15") != "no error");
}

TEST_CASE("parse_angle and parse_angle_list") {
    CHECK(parse_angle("60 deg") == doctest::Approx(pi / 3).epsilon(1e-16));
    CHECK(parse_angle("0.5 rad") == 0.5);
    CHECK_THROWS_AS(parse_angle("0.5"), ConfigError);
    CHECK_THROWS_AS(parse_angle("3.2 rad"), ConfigError);
    const auto list = parse_angle_list("30, 60, 90 deg");
    REQUIRE(list.size() == 3);
    CHECK(list[2] == doctest::Approx(pi / 2).epsilon(1e-16));
}

TEST_CASE("parse_study_config: subcommand defaults") {
    const StudyConfig ids = parse_study_config("", "check-identities");
    CHECK(ids.n_beta == 512);
    CHECK(ids.samples == 20);
    CHECK(ids.tolerance == 1e-5);
    CHECK(ids.thetas.size() == 5);
    const StudyConfig ineq = parse_study_config("n = 3", "check-inequalities");
    CHECK(ineq.n == 3);
    CHECK(ineq.samples == 50);
    CHECK(ineq.tolerance == 1e-6);
    CHECK(ineq.thetas.size() == 3);
    const StudyConfig full = parse_study_config("mode = full2d", "check-identities");
    CHECK(full.n_beta == 128);
    CHECK(full.n_alpha == 128);
    CHECK(full.tolerance == 1e-4);
    CHECK_THROWS_AS(parse_study_config("samples = 0", "check-identities"), ConfigError);
    CHECK_THROWS_AS(parse_study_config("theta = 60 deg", "check-identities"), ConfigError);
}

TEST_CASE("parse_sweep_config: theta list") {
    const SweepConfig s = parse_sweep_config("thetas = 45, 90 deg; n_beta = 32; initial = perturbed eps=0.1");
    REQUIRE(s.thetas.size() == 2);
    CHECK(s.thetas[0] == doctest::Approx(pi / 4).epsilon(1e-16));
    CHECK(s.flow.n_beta == 32);
}

TEST_CASE("timeseries: header is fixed text") {
    CHECK(timeseries_header(2) ==
          "t,dt,max_F,V0,V1,V2,V3,mink_res_1,mink_res_2,static_res,iso_ratio,af_ratio_1,af_ratio_2,mink_gap,min_u,"
          "min_kappa,max_H,bc_res,r_fit,rms_fit");
    CHECK(split_csv(timeseries_header(3)).size() == 3 + 5 + 3 + 2 + 3 + 7);
}

TEST_CASE("timeseries: static cap run writes constant-volume rows") {
    FlowConfig c;
    c.theta = pi / 3;
    c.n_beta = 64;
    c.initial = {"cap", 1.0, 0.0, 1};
    c.max_steps = 20;
    c.output_every = 10;
    const RunResult r = run(c);
    REQUIRE(r.reports.size() == 3);
    const fs::path dir = scratch_dir("csv");
    write_timeseries(dir / "ts.csv", r.reports, 2);
    const auto rows = lines_of(read_text_file(dir / "ts.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == timeseries_header(2));
    const std::size_t cols = split_csv(rows[0]).size();
    const double v0 = std::stod(split_csv(rows[1])[3]);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split_csv(rows[i]);
        CHECK(cells.size() == cols);
        CHECK(std::abs(std::stod(cells[3]) - v0) < 1e-10);
    }
    // Full precision: the printed value reads back exactly.
    CHECK(std::stod(split_csv(rows[3])[0]) == r.reports.back().t);
    CHECK_THROWS_AS(write_timeseries(dir / "empty.csv", {}, 2), IoError);
    CHECK_THROWS_AS(write_timeseries("/nonexistent-dir/ts.csv", r.reports, 2), IoError);
}

TEST_CASE("timeseries: converged run ends below the stopping tolerance") {
    FlowConfig c;
    c.theta = pi / 2;
    c.n_beta = 32;
    c.initial = {"perturbed", 1.0, 0.05, 2};
    c.output_every = 500;
    const RunResult r = run(c);
    REQUIRE(r.status == RunStatus::Converged);
    const auto cells = split_csv(lines_of(timeseries_row(r.reports.back()))[0]);
    CHECK(std::stod(cells[2]) < c.stop_tol);
}

TEST_CASE("snapshot: hemisphere equator node and cap axis height") {
    const Grid g = build_grid(Mode::Axisym, 2, 64);
    const auto hemi = lines_of(snapshot_text(cap_graph({pi / 2, 1.0}, g), 0.0));
    CHECK(hemi[0] == "capflow-snapshot v1");
    CHECK(hemi[1].rfind("axisym 2 64 1 ", 0) == 0);
    REQUIRE(hemi.size() == 2 + 64);
    std::istringstream last(hemi.back());
    double beta, phi, x, z;
    last >> beta >> phi >> x >> z;
    CHECK(beta == pi / 2);
    CHECK(x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(z == 0.0);

    // Nearest node to the axis: z tends to r (1 - cos theta) = 0.5.
    std::vector<double> errors;
    for (int nb : {64, 128, 256}) {
        const auto cap = lines_of(snapshot_text(cap_graph({pi / 3, 1.0}, build_grid(Mode::Axisym, 2, nb)), 0.0));
        std::istringstream first(cap[2]);
        first >> beta >> phi >> x >> z;
        errors.push_back(std::abs(z - 0.5));
    }
    CHECK(errors.back() < 1e-4);
    CHECK(convergence_order(errors) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("snapshot: round trip reproduces phi bit for bit") {
    const fs::path dir = scratch_dir("snap");
    for (Mode m : {Mode::Axisym, Mode::Full2D}) {
        const Grid g = build_grid(m, 2, 24, 16);
        std::mt19937_64 rng(31);
        const RadialGraph rg = random_capillary_graph(g, 2.0, 0.1, rng);
        write_snapshot(dir / "s.txt", rg, 0.123456789012345678);
        const Snapshot back = read_snapshot(dir / "s.txt");
        CHECK(back.rg.phi == rg.phi);
        CHECK(back.rg.theta == rg.theta);
        CHECK(back.t == 0.123456789012345678);
        CHECK(back.rg.grid.mode == m);
        CHECK(back.rg.grid.na == g.na);
    }
    CHECK_THROWS_AS(parse_snapshot("not a snapshot\n"), IoError);
    CHECK_THROWS_AS(parse_snapshot("capflow-snapshot v1\naxisym 2 16 1 1 0\n0.1 0 1 1\n"), IoError);
}

TEST_CASE("manifest and verdict stream") {
    const fs::path dir = scratch_dir("manifest");
    RunManifest m;
    m.command = "run";
    m.config_echo = "theta = 60 deg\nn_beta = 32";
    m.grid = describe_grid(build_grid(Mode::Axisym, 2, 32));
    m.start_time = m.end_time = utc_timestamp();
    m.status = "converged";
    m.files = {"timeseries.csv"};
    write_manifest(dir / "manifest.txt", m);
    const std::string text = read_text_file(dir / "manifest.txt");
    CHECK(text.find("version: capflow 1.0.0") != std::string::npos);
    CHECK(text.find("status: converged") != std::string::npos);
    CHECK(text.find("  theta = 60 deg") != std::string::npos);
    CHECK(text.find("grid: axisym n=2 n_beta=32") != std::string::npos);

    {
        VerdictWriter w(dir / "v.jsonl");
        w.write(to_json(Verdict{"alpha", true, {{"value", 1.5}}}));
        w.write(to_json(Verdict{"beta", false, {}}));
    }
    const auto rows = lines_of(read_text_file(dir / "v.jsonl"));
    REQUIRE(rows.size() == 2);
    const auto j0 = nlohmann::json::parse(rows[0]);
    CHECK(j0["check"] == "alpha");
    CHECK(j0["pass"] == true);
    CHECK(j0["value"] == 1.5);
    CHECK(nlohmann::json::parse(rows[1])["pass"] == false);
    CHECK_THROWS_AS(read_text_file(dir / "missing.txt"), IoError);
}

TEST_CASE("format_double: 17 significant digits round-trip") {
    for (double x : {pi, 1.0 / 3.0, 1e-300, -2.5e17, 0.1}) CHECK(std::stod(format_double(x)) == x);
}

TEST_CASE("cli: exit codes and outputs") {
    const fs::path dir = scratch_dir("cli");
    write_file(dir / "cap.cfg", "theta = 90 deg\nn_beta = 64\ninitial = cap r=1\nt_max = 0\n");
    write_file(dir / "pert.cfg", "theta = 60 deg\nn_beta = 32\ninitial = perturbed eps=0.1\nt_max = 0\n");
    write_file(dir / "bad.cfg", "theta = 60 deg\nbogus = 1\n");
    write_file(dir / "ids.cfg", "n_beta = 128\nsamples = 2\nthetas = 30, 90 deg\ntolerance = 1e-4\n");
    write_file(dir / "ids_strict.cfg", "n_beta = 64\nsamples = 1\nthetas = 60 deg\ntolerance = 1e-14\n");

    CHECK(run_cli("run --quiet --config " + (dir / "cap.cfg").string() + " --out " + (dir / "cap").string()) == 0);
    for (const char* f : {"initial.snapshot", "final.snapshot", "timeseries.csv", "verdicts.jsonl", "manifest.txt"})
        CHECK(fs::exists(dir / "cap" / f));
    CHECK(run_cli("run --quiet --config " + (dir / "pert.cfg").string() + " --out " + (dir / "pert").string()) == 1);
    CHECK(read_text_file(dir / "pert" / "manifest.txt").find("status: not_converged") != std::string::npos);
    CHECK(run_cli("run --quiet --config " + (dir / "bad.cfg").string() + " --out " + (dir / "bad").string()) == 2);
    CHECK(run_cli("run --quiet --out " + (dir / "none").string()) == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("check-identities --quiet --config " + (dir / "ids.cfg").string() + " --out " + (dir / "ids").string()) == 0);
    const auto verdicts = lines_of(read_text_file(dir / "ids" / "verdicts.jsonl"));
    CHECK(verdicts.size() >= 2 * 2 * 2);
    for (const auto& v : verdicts) CHECK(nlohmann::json::parse(v)["pass"] == true);
    CHECK(run_cli("check-identities --quiet --config " + (dir / "ids_strict.cfg").string() + " --out " +
                  (dir / "ids_strict").string()) == 1);

    // CAPFLOW_OUT is the fallback output directory.
    const std::string env_run = "CAPFLOW_OUT=" + (dir / "env").string() + " " + std::string(CAPFLOW_CLI_PATH) +
                                " run --quiet --config " + (dir / "cap.cfg").string() + " > /dev/null 2>&1";
    CHECK(std::system(env_run.c_str()) == 0);
    CHECK(fs::exists(dir / "env" / "timeseries.csv"));

    // Identical config and version give byte-identical CSV.
    CHECK(run_cli("run --quiet --config " + (dir / "cap.cfg").string() + " --out " + (dir / "cap2").string()) == 0);
    CHECK(read_text_file(dir / "cap" / "timeseries.csv") == read_text_file(dir / "cap2" / "timeseries.csv"));
}

}  // TEST_SUITE
