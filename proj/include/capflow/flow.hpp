// Time integration of d phi / dt = F with Heun's method, parabolic step
// control, runtime monitors and stopping rules.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "capflow/functionals.hpp"
#include "capflow/oracle.hpp"

namespace capflow {

// Smooth perturbation of a cap graph that keeps the capillary condition
// exact at beta = pi/2:
//   psi = sum_m a_m cos^m(beta)                          (m >= 2)
//       + sum_m sin^{m+2}(beta) (b_m cos m alpha + c_m sin m alpha)
//       + (beta - pi/2) chi(beta) B(alpha),
// where B restores d_beta phi = cot(theta) sqrt(1 + phi_alpha^2) and chi is
// a smooth cutoff supported in [pi/4, pi/2].
struct Perturbation {
    std::vector<double> axial;  // a_m for m = 2, 3, ...
    struct Harmonic {
        int m = 1;
        double b = 0.0, c = 0.0;
    };
    std::vector<Harmonic> azimuthal;  // Full2D only
};

double perturbation_value(const Perturbation& p, double theta, double beta, double alpha);
ScalarField perturbed_cap(const Grid& grid, const CapSpec& cap, const Perturbation& p);

// Random perturbation of Euclidean size eps in coefficient space.
// Azimuthal modes (orders min_order..3) are only drawn when azimuthal is set.
Perturbation random_perturbation(std::mt19937_64& rng, double eps, bool azimuthal, int min_azimuthal_order = 1);

struct InitialSpec {
    std::string kind = "cap";  // cap | perturbed | random | sphere | ellipsoid
    double r = 1.0;
    double eps = 0.0;
    int shape = 1;  // for kind = perturbed
};

// Named deterministic perturbations used by the examples and tests.
Perturbation named_perturbation(int shape, double eps);

ScalarField initial_phi(const Grid& grid, double theta, const InitialSpec& spec, std::uint64_t seed);

struct FlowConfig {
    double theta = 0.0;
    Mode mode = Mode::Axisym;
    int n = 2;
    int n_beta = 128;
    int n_alpha = 1;
    InitialSpec initial;
    double dt_safety = 0.4;
    double t_max = 50.0;
    double stop_tol = 1e-7;
    double mono_tol = 1e-8;    // relative to V_k(0), per step
    double volume_tol = 1e-4;  // reported against volume_drift
    long output_every = 1000;  // steps between reports
    long monitor_every = 1;    // steps between monitor evaluations
    long max_steps = 0;        // 0 = unlimited
    std::uint64_t seed = 1;
};

struct MonitorRecord {
    double volume_drift = 0.0;
    long v1_increase_events = 0;
    std::vector<long> increase_events;  // k = 1..n stored at k-1
    double min_u = 0.0;
    double min_kappa = 0.0;
    double max_H = 0.0;
    double static_residual = 0.0;
    double bc_residual = 0.0;
    // Extremes over the run so far.
    double run_min_u = 0.0;
    double run_min_kappa = 0.0;
    double run_max_H = 0.0;
    double run_max_volume_drift = 0.0;
};

struct FlowState {
    RadialGraph rg;
    ScalarField carry;  // compensated-summation remainder of phi
    double t = 0.0;
    long step = 0;
    double dt_last = 0.0;
    MonitorRecord monitors;
};

struct FlowAborted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

FlowState make_state(RadialGraph rg);

// One Heun step: phi* = phi + dt F(phi); phi' = phi + dt/2 (F(phi) + F(phi*)).
void step(FlowState& state, double dt);
void step(FlowState& state, double dt, const ScalarField& F0);
// Forward Euler, used only by the temporal-order study.
void euler_step(FlowState& state, double dt);

double stable_dt(const FlowState& state, double dt_safety);

// Quantities sampled every monitor tick.
struct MonitorSample {
    std::vector<double> V;  // V_0..V_n
    double min_u = 0.0, min_kappa = 0.0, max_H = 0.0;
    double static_residual = 0.0, bc_residual = 0.0;
    double min_ubar = 0.0;
};

MonitorSample sample_monitors(const RadialGraph& rg);

// Update the monitor record from the previous and current samples.
void monitor(MonitorRecord& rec, const MonitorSample& prev, const MonitorSample& cur, const MonitorSample& baseline,
             double mono_tol);

enum class RunStatus { Converged, NotConverged, Aborted };
std::string to_string(RunStatus s);

struct RunResult {
    RunStatus status = RunStatus::NotConverged;
    std::string message;
    std::vector<FunctionalReport> reports;
    FlowState final_state;
    FunctionalReport initial_report;
    MonitorSample baseline;
    double c0_estimate = 0.0;        // min ubar(0) (1 - |cos theta|)
    bool initial_bc_compatible = true;
    BoundaryDiagnostics final_boundary;
};

using RunObserver = std::function<void(const FlowState&, const FunctionalReport&)>;

RunResult run(const FlowConfig& config, const RunObserver& observer = {});
RunResult run_from(const FlowConfig& config, RadialGraph initial, const RunObserver& observer = {});

}  // namespace capflow
