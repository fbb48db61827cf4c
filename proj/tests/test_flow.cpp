#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "capflow/studies.hpp"
#include "test_support.hpp"

using namespace capflow;
using capflow::test::max_abs;
using capflow::test::max_abs_diff;
using std::numbers::pi;

namespace {

FlowConfig perturbed_config(double theta, int nb, int shape = 1, double eps = 0.1) {
    FlowConfig c;
    c.theta = theta;
    c.n_beta = nb;
    c.initial = {"perturbed", 1.0, eps, shape};
    c.output_every = 0;
    return c;
}

double predicted_radius(const RunResult& r, double theta, int n) {
    return std::pow(r.initial_report.V[0] / reference_constants(theta, n).b_theta, 1.0 / (n + 1));
}

// Integrates to time T with `steps` equal steps of either scheme.
ScalarField integrate_to(const RadialGraph& rg, double T, int steps, bool heun) {
    FlowState s = make_state(rg);
    const double dt = T / steps;
    for (int i = 0; i < steps; ++i) heun ? step(s, dt) : euler_step(s, dt);
    return s.rg.phi;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("stable_dt: parabolic scaling and the hemisphere bracket") {
    const FlowState s64 = make_state(cap_graph({pi / 2, 1.0}, build_grid(Mode::Axisym, 2, 64)));
    const FlowState s128 = make_state(cap_graph({pi / 2, 1.0}, build_grid(Mode::Axisym, 2, 128)));
    const double dt = stable_dt(s64, 0.5);
    CHECK(dt >= 1e-5);
    CHECK(dt <= 1e-2);
    const double ratio = dt / stable_dt(s128, 0.5);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
    CHECK(stable_dt(s64, 0.25) == doctest::Approx(dt / 2).epsilon(1e-15));
    const FlowState f32 = make_state(cap_graph({pi / 3, 1.0}, build_grid(Mode::Full2D, 2, 32, 32)));
    const FlowState f64 = make_state(cap_graph({pi / 3, 1.0}, build_grid(Mode::Full2D, 2, 64, 64)));
    // Full2D: the azimuthal spacing next to the pole is sin(h/2) * dalpha,
    // which is O(h^2), so the step shrinks by 16 per refinement.
    const double fr = stable_dt(f32, 0.5) / stable_dt(f64, 0.5);
    CHECK(fr >= 14.0);
    CHECK(fr <= 18.0);
}

TEST_CASE("run: invalid safety factors and angles are rejected") {
    FlowConfig c = perturbed_config(pi / 3, 32);
    c.dt_safety = 0.0;
    CHECK_THROWS_AS(run(c), std::invalid_argument);
    c.dt_safety = 1.5;
    CHECK_THROWS_AS(run(c), std::invalid_argument);
    c.dt_safety = 0.4;
    c.theta = pi;
    CHECK_THROWS_AS(run(c), std::invalid_argument);
}

TEST_CASE("step: an exact cap moves only by its discretization error") {
    const Grid g = build_grid(Mode::Axisym, 2, 128);
    FlowState s = make_state(cap_graph({pi / 3, 1.0}, g));
    const ScalarField before = s.rg.phi;
    const double maxF = max_abs(scalar_rhs(s.rg));
    const double dt = stable_dt(s, 0.4);
    step(s, dt);
    CHECK(maxF < 1e-4);
    CHECK(max_abs_diff(s.rg.phi, before) <= 1.01 * dt * maxF);
    CHECK(s.t == dt);
    CHECK(s.step == 1);
}

TEST_CASE("step: a dilated hemisphere and a perturbed one keep their volume") {
    for (double eps : {0.0, 0.1}) {
        const Grid g = build_grid(Mode::Axisym, 2, 64);
        RadialGraph rg{g, perturbed_cap(g, {pi / 2, 1.2}, named_perturbation(2, eps)), pi / 2};
        FlowState s = make_state(rg);
        const double v0 = enclosed_volume(s.rg);
        for (int i = 0; i < 1000; ++i) step(s, stable_dt(s, 0.4));
        CAPTURE(eps);
        CHECK(std::abs(enclosed_volume(s.rg) - v0) / v0 < 1e-4);
    }
}

TEST_CASE("step: Heun is second order in time, forward Euler first order") {
    const Grid g = build_grid(Mode::Axisym, 2, 24);
    std::mt19937_64 rng(23);
    const RadialGraph rg = random_capillary_graph(g, pi / 3, 0.1, rng);
    const double T = 20 * stable_dt(make_state(rg), 1.0);
    for (bool heun : {true, false}) {
        std::vector<ScalarField> sols;
        for (int steps : {20, 40, 80, 160}) sols.push_back(integrate_to(rg, T, steps, heun));
        std::vector<double> diffs;
        for (std::size_t i = 0; i + 1 < sols.size(); ++i) diffs.push_back(max_abs_diff(sols[i], sols[i + 1]));
        const double order = convergence_order(diffs);
        CAPTURE(heun);
        CHECK(order == doctest::Approx(heun ? 2.0 : 1.0).epsilon(0.1));
    }
}

TEST_CASE("step: the compensated update keeps the phi + carry sum") {
    const Grid g = build_grid(Mode::Axisym, 2, 32);
    FlowState s = make_state(cap_graph({pi / 2, 1.0}, g));
    for (double c : s.carry) CHECK(c == 0.0);
    std::mt19937_64 rng(29);
    s = make_state(random_capillary_graph(g, pi / 2, 0.05, rng));
    for (int i = 0; i < 10; ++i) step(s, stable_dt(s, 0.4));
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(s.carry[i]) <= 1e-15 * std::abs(s.rg.phi[i]) + 1e-17);
}

TEST_CASE("run: exact caps are converged at t = 0") {
    FlowConfig c;
    c.theta = pi / 2;
    c.n_beta = 256;
    c.initial = {"cap", 1.0, 0.0, 1};
    RunResult r = run(c);
    CHECK(r.status == RunStatus::Converged);
    CHECK(r.final_state.step == 0);
    CHECK(r.final_state.t == 0.0);
    CHECK(r.reports.size() == 1);
    // A 60 degree cap at N = 256 is stationary to the stopping tolerance too.
    c.theta = pi / 3;
    r = run(c);
    CHECK(r.status == RunStatus::Converged);
    CHECK(r.final_state.step == 0);
}

TEST_CASE("run: t_max = 0 stops a non-cap as not converged") {
    FlowConfig c = perturbed_config(pi / 3, 32);
    c.t_max = 0.0;
    const RunResult r = run(c);
    CHECK(r.status == RunStatus::NotConverged);
    CHECK(r.final_state.step == 0);
}

TEST_CASE("run: non-finite data abort with a diagnostic") {
    FlowConfig c = perturbed_config(pi / 3, 32);
    const Grid g = build_grid(Mode::Axisym, 2, 32);
    RadialGraph rg = cap_graph({pi / 3, 1.0}, g);
    rg.phi[5] = std::numeric_limits<double>::quiet_NaN();
    const RunResult r = run_from(c, rg);
    CHECK(r.status == RunStatus::Aborted);
    CHECK(r.message.find("non-finite") != std::string::npos);
}

TEST_CASE("run: a perturbed 60 degree cap converges to the volume-matched cap") {
    const double theta = pi / 3;
    FlowConfig c = perturbed_config(theta, 64);
    c.output_every = 2000;
    const RunResult r = run(c);
    REQUIRE(r.status == RunStatus::Converged);
    CHECK(r.initial_bc_compatible);
    const FunctionalReport& last = r.reports.back();
    CHECK(last.max_F < c.stop_tol);
    const double rp = predicted_radius(r, theta, 2);
    CHECK(std::abs(last.fitted_cap.r - rp) < 1e-3 * rp);
    // Stationarity means a cap: the fit residual is at the stopping scale.
    CHECK(last.fitted_cap.rms < 10 * c.stop_tol * last.fitted_cap.r);
    // Monitors: volume, monotonicity, star-shapedness, curvature bounds.
    const MonitorRecord& m = r.final_state.monitors;
    CHECK(m.run_max_volume_drift < 1e-4);
    for (long e : m.increase_events) CHECK(e == 0);
    CHECK(m.run_min_u >= 0.9 * r.c0_estimate);
    CHECK(m.run_max_H <= r.baseline.max_H * (1 + 1e-6));
    CHECK(r.baseline.min_kappa > 0.0);
    CHECK(m.run_min_kappa > 0.0);
    // Reports are time-ordered.
    for (std::size_t i = 1; i < r.reports.size(); ++i) CHECK(r.reports[i].t > r.reports[i - 1].t);
    CHECK(r.final_boundary.dmu_ubar < 1e-4);
}

TEST_CASE("run: static cap run keeps every monitor quiet") {
    FlowConfig c;
    c.theta = pi / 3;
    c.n_beta = 64;
    c.initial = {"cap", 1.0, 0.0, 1};
    c.max_steps = 200;
    c.output_every = 50;
    const RunResult r = run(c);
    const MonitorRecord& m = r.final_state.monitors;
    CHECK(m.run_max_volume_drift < 1e-10);
    for (long e : m.increase_events) CHECK(e == 0);
    CHECK(r.reports.size() >= 2);
}

TEST_CASE("monitor: counts increases beyond the tolerance only") {
    MonitorSample base, prev, cur;
    base.V = {1.0, 2.0, 3.0};
    prev = base;
    cur = base;
    cur.V[1] = 2.0 + 1.5e-8;  // below 1e-8 * V_1(0) = 2e-8
    cur.V[2] = 3.0 + 4e-8;    // above 1e-8 * V_2(0) = 3e-8
    cur.V[0] = 1.0 + 1e-6;
    cur.min_u = 0.5;
    cur.min_kappa = 0.2;
    cur.max_H = 3.0;
    MonitorRecord rec;
    rec.run_min_u = 1.0;
    rec.run_min_kappa = 1.0;
    rec.run_max_H = 1.0;
    monitor(rec, prev, cur, base, 1e-8);
    CHECK(rec.increase_events == std::vector<long>{0, 1});
    CHECK(rec.v1_increase_events == 0);
    CHECK(rec.volume_drift == doctest::Approx(1e-6).epsilon(1e-9));
    CHECK(rec.run_min_u == 0.5);
    CHECK(rec.run_min_kappa == 0.2);
    CHECK(rec.run_max_H == 3.0);
}

TEST_CASE("initial data: perturbations keep the capillary condition") {
    for (Mode m : {Mode::Axisym, Mode::Full2D}) {
        const Grid g = build_grid(m, 2, 64, 64);
        for (int shape : {1, 2, 3}) {
            const RadialGraph rg{g, perturbed_cap(g, {pi / 4, 1.0}, named_perturbation(shape, 0.1)), pi / 4};
            const GeometryField geo = compute_geometry(rg);
            double res = 0.0;
            for (int k = 0; k < g.na; ++k) {
                const std::size_t i = g.index(g.boundary_row(), k);
                res = std::max(res, std::abs(geo.nu_e[i] + std::cos(pi / 4)));
            }
            CAPTURE(shape);
            CHECK(res < 1e-3);
        }
    }
    const Grid g = build_grid(Mode::Full2D, 2, 32, 32);
    CHECK(initial_phi(g, pi / 3, {"random", 1.0, 0.1, 1}, 7) == initial_phi(g, pi / 3, {"random", 1.0, 0.1, 1}, 7));
    CHECK(initial_phi(g, pi / 3, {"random", 1.0, 0.1, 1}, 7) != initial_phi(g, pi / 3, {"random", 1.0, 0.1, 1}, 8));
}

}  // TEST_SUITE
