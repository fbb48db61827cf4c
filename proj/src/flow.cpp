#include "capflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "parallel.hpp"

namespace capflow {

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double x : f) {
        if (!std::isfinite(x)) return std::numeric_limits<double>::infinity();
        m = std::max(m, std::abs(x));
    }
    return m;
}

// phi += inc with a Kahan remainder: over ~10^6 steps the plain sum would
// leave a round-off random walk of the enclosed volume.
void compensated_add(ScalarField& phi, ScalarField& carry, const ScalarField& inc, double scale) {
#pragma omp parallel for if (detail::go_parallel(phi.size()))
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double y = scale * inc[i] - carry[i];
        const double s = phi[i] + y;
        carry[i] = (s - phi[i]) - y;
        phi[i] = s;
    }
}

// One-sided second-order check of the capillary condition on the initial data.
bool bc_compatible(const RadialGraph& rg) {
    const Grid& g = rg.grid;
    const auto slope = capillary_slope(rg.phi, rg.theta, g);
    const int b = g.boundary_row();
    const double h = g.dbeta;
    double worst = 0.0;
    for (int k = 0; k < g.na; ++k) {
        const double d =
            (3.0 * rg.phi[g.index(b, k)] - 4.0 * rg.phi[g.index(b - 1, k)] + rg.phi[g.index(b - 2, k)]) / (2.0 * h);
        worst = std::max(worst, std::abs(d - slope[k]));
    }
    // Compatible data leave an O(h^2) mismatch; anything O(1) is flagged.
    return worst <= 0.1 * h;
}

}  // namespace

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Converged: return "converged";
        case RunStatus::NotConverged: return "not_converged";
        case RunStatus::Aborted: return "aborted";
    }
    return "unknown";
}

FlowState make_state(RadialGraph rg) {
    FlowState s;
    s.carry.assign(rg.phi.size(), 0.0);
    s.rg = std::move(rg);
    return s;
}

void step(FlowState& state, double dt) {
    const ScalarField F0 = scalar_rhs(state.rg.grid, state.rg.theta, fill_ghost(state.rg.phi, state.rg.theta, state.rg.grid));
    step(state, dt, F0);
}

void step(FlowState& state, double dt, const ScalarField& F0) {
    const Grid& g = state.rg.grid;
    const double theta = state.rg.theta;
    ScalarField pred(state.rg.phi.size());
    for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = state.rg.phi[i] + dt * F0[i];
    const ScalarField F1 = scalar_rhs(g, theta, fill_ghost(pred, theta, g));
    if (!std::isfinite(max_abs(F1))) throw FlowAborted("non-finite speed in Heun corrector at t = " + std::to_string(state.t));
    ScalarField inc(pred.size());
    for (std::size_t i = 0; i < inc.size(); ++i) inc[i] = F0[i] + F1[i];
    compensated_add(state.rg.phi, state.carry, inc, 0.5 * dt);
    state.t += dt;
    state.dt_last = dt;
    ++state.step;
}

void euler_step(FlowState& state, double dt) {
    const ScalarField F = scalar_rhs(state.rg);
    compensated_add(state.rg.phi, state.carry, F, dt);
    state.t += dt;
    state.dt_last = dt;
    ++state.step;
}

double stable_dt(const FlowState& state, double dt_safety) {
    // dt = safety * min spacing^2 / (2 n D) with D = u / rho^2 = 1 / (rho v).
    const Grid& g = state.rg.grid;
    const PaddedField p = fill_ghost(state.rg.phi, state.rg.theta, g);
    const CovectorField grad = gradient(p, g);
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.nb; ++j) {
        const double spacing = g.full2d() ? std::min(g.dbeta, g.sin_beta[j] * g.dalpha) : g.dbeta;
        for (int k = 0; k < g.na; ++k) {
            const std::size_t i = g.index(j, k);
            const double v = std::sqrt(1.0 + grad.b[i] * grad.b[i] + grad.a[i] * grad.a[i]);
            const double D = std::exp(-state.rg.phi[i]) / v;
            best = std::min(best, spacing * spacing / (2.0 * g.n * D));
        }
    }
    return dt_safety * best;
}

MonitorSample sample_monitors(const RadialGraph& rg) {
    const GeometryField geo = compute_geometry(rg);
    const int n = rg.grid.n;
    MonitorSample s;
    s.V.resize(n + 1);
    for (int k = 0; k <= n; ++k) s.V[k] = quermassintegral(rg, geo, k);
    s.min_u = *std::min_element(geo.u.begin(), geo.u.end());
    s.min_ubar = *std::min_element(geo.ubar.begin(), geo.ubar.end());
    s.min_kappa = *std::min_element(geo.kappa.begin(), geo.kappa.end());
    s.max_H = *std::max_element(geo.H.begin(), geo.H.end());
    s.static_residual = static_residual(rg, geo);
    const double ct = std::cos(rg.theta);
    const int b = rg.grid.boundary_row();
    for (int k = 0; k < rg.grid.na; ++k)
        s.bc_residual = std::max(s.bc_residual, std::abs(geo.nu_e[rg.grid.index(b, k)] + ct));
    return s;
}

void monitor(MonitorRecord& rec, const MonitorSample& prev, const MonitorSample& cur, const MonitorSample& baseline,
             double mono_tol) {
    const int n = static_cast<int>(cur.V.size()) - 1;
    if (static_cast<int>(rec.increase_events.size()) != n) rec.increase_events.assign(n, 0);
    for (int k = 1; k <= n; ++k)
        if (cur.V[k] > prev.V[k] + mono_tol * std::abs(baseline.V[k])) ++rec.increase_events[k - 1];
    rec.v1_increase_events = rec.increase_events[0];
    rec.volume_drift = std::abs(cur.V[0] - baseline.V[0]) / baseline.V[0];
    rec.min_u = cur.min_u;
    rec.min_kappa = cur.min_kappa;
    rec.max_H = cur.max_H;
    rec.static_residual = cur.static_residual;
    rec.bc_residual = cur.bc_residual;
    rec.run_min_u = std::min(rec.run_min_u, cur.min_u);
    rec.run_min_kappa = std::min(rec.run_min_kappa, cur.min_kappa);
    rec.run_max_H = std::max(rec.run_max_H, cur.max_H);
    rec.run_max_volume_drift = std::max(rec.run_max_volume_drift, rec.volume_drift);
}

RunResult run(const FlowConfig& config, const RunObserver& observer) {
    const Grid grid = build_grid(config.mode, config.n, config.n_beta, config.n_alpha);
    RadialGraph rg{grid, initial_phi(grid, config.theta, config.initial, config.seed), config.theta};
    return run_from(config, std::move(rg), observer);
}

RunResult run_from(const FlowConfig& config, RadialGraph initial, const RunObserver& observer) {
    if (!(config.theta > 0.0 && config.theta < kPi)) throw std::invalid_argument("theta out of (0, pi)");
    if (!(config.dt_safety > 0.0 && config.dt_safety <= 1.0)) throw std::invalid_argument("dt_safety must lie in (0, 1]");
    if (!(config.stop_tol > 0.0)) throw std::invalid_argument("stop_tol must be positive");

    RunResult res;
    for (double p : initial.phi)
        if (!std::isfinite(p)) {
            res.status = RunStatus::Aborted;
            res.message = "non-finite phi in the initial data";
            res.final_state = make_state(std::move(initial));
            return res;
        }
    res.initial_bc_compatible = bc_compatible(initial);
    FlowState state = make_state(std::move(initial));
    const Grid& g = state.rg.grid;
    const double theta = state.rg.theta;

    res.baseline = sample_monitors(state.rg);
    MonitorSample prev = res.baseline;
    MonitorRecord& rec = state.monitors;
    rec.increase_events.assign(g.n, 0);
    monitor(rec, prev, prev, res.baseline, config.mono_tol);
    rec.run_min_u = res.baseline.min_u;
    rec.run_min_kappa = res.baseline.min_kappa;
    rec.run_max_H = res.baseline.max_H;
    res.c0_estimate = res.baseline.min_ubar * (1.0 - std::abs(std::cos(theta)));

    res.initial_report = make_report(state.rg, 0.0);
    res.reports.push_back(res.initial_report);
    if (observer) observer(state, res.initial_report);
    long last_report_step = 0;

    try {
        for (;;) {
            const ScalarField F0 = scalar_rhs(g, theta, fill_ghost(state.rg.phi, theta, g));
            const double maxF = max_abs(F0);
            if (!std::isfinite(maxF)) throw FlowAborted("non-finite speed at t = " + std::to_string(state.t));
            if (maxF < config.stop_tol) {
                res.status = RunStatus::Converged;
                break;
            }
            if (state.t >= config.t_max || (config.max_steps > 0 && state.step >= config.max_steps)) {
                res.status = RunStatus::NotConverged;
                break;
            }
            double dt = stable_dt(state, config.dt_safety);
            if (state.t + dt > config.t_max) dt = config.t_max - state.t;
            step(state, dt, F0);

            if (state.step % config.monitor_every == 0) {
                const MonitorSample cur = sample_monitors(state.rg);
                monitor(rec, prev, cur, res.baseline, config.mono_tol);
                prev = cur;
            }
            if (config.output_every > 0 && state.step % config.output_every == 0) {
                FunctionalReport rep = make_report(state.rg, state.t);
                rep.dt = state.dt_last;
                res.reports.push_back(rep);
                last_report_step = state.step;
                if (observer) observer(state, rep);
            }
        }
    } catch (const FlowAborted& e) {
        res.status = RunStatus::Aborted;
        res.message = e.what();
    }

    if (res.status != RunStatus::Aborted) {
        if (state.step > 0 && last_report_step != state.step) {
            FunctionalReport rep = make_report(state.rg, state.t);
            rep.dt = state.dt_last;
            res.reports.push_back(rep);
            if (observer) observer(state, rep);
        }
        res.final_boundary = boundary_diagnostics(state.rg, compute_geometry(state.rg));
    }
    res.final_state = std::move(state);
    return res;
}

}  // namespace capflow
