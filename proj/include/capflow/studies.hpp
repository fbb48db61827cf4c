// Verification studies behind the check-identities, check-inequalities and
// convergence-study subcommands.  Every check produces a machine-readable
// verdict record; the CLI streams them as JSON lines.
#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "capflow/io.hpp"

namespace capflow {

struct Verdict {
    std::string check;
    bool pass = false;
    nlohmann::json detail;
};

nlohmann::json to_json(const Verdict& v);

using VerdictSink = std::function<void(const Verdict&)>;

struct StudyResult {
    std::vector<Verdict> verdicts;
    bool pass() const;
    std::size_t failures() const;
};

// Deterministic per-sample generator derived from (seed, config index, sample).
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t config_index, std::uint64_t sample);

// Random BC-compatible star-shaped graph: a cap of random radius in
// [0.5, 2] plus a random perturbation of size eps.
RadialGraph random_capillary_graph(const Grid& grid, double theta, double eps, std::mt19937_64& rng,
                                   int min_azimuthal_order = 1);

// Random strictly convex capillary graph (redraws until every node is
// convex, shrinking the perturbation if draws keep failing).
RadialGraph random_convex_graph(const Grid& grid, double theta, double eps, std::mt19937_64& rng);

StudyResult check_identities(const StudyConfig& config, const VerdictSink& sink = {});
StudyResult check_inequalities(const StudyConfig& config, const VerdictSink& sink = {});
StudyResult convergence_study(const StudyConfig& config, const VerdictSink& sink = {});

// Building blocks of the convergence study.
struct OrderEstimate {
    std::vector<int> resolutions;  // n_beta per level (or steps per run)
    std::vector<double> steps;     // h or dt per level
    std::vector<double> errors;
    double order = 0.0;
};

OrderEstimate gradient_order(Mode mode, int n, int n_beta0, int levels);
OrderEstimate hessian_order(Mode mode, int n, int n_beta0, int levels);
OrderEstimate ellipsoid_curvature_order(Mode mode, int n, int n_beta0, int levels, double eps = 0.3);
// Heun on a fixed grid: errors are differences of successive dt halvings at
// a fixed final time.
OrderEstimate heun_temporal_order(Mode mode, int n, int n_beta, double theta, int levels);

// Static residual and max|F| of an exact cap.
struct CapStationarity {
    double static_residual = 0.0;
    double max_F = 0.0;
};
CapStationarity cap_stationarity(Mode mode, int n, int n_beta, double theta, double r);

}  // namespace capflow
