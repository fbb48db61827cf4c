#include <cmath>
#include <numbers>
#include <stdexcept>

#include "capflow/flow.hpp"

namespace capflow {

namespace {

constexpr double kPi = std::numbers::pi;

// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
    return a / (a + b);
}

}  // namespace

double perturbation_value(const Perturbation& p, double theta, double beta, double alpha) {
    const double cb = std::cos(beta), sb = std::sin(beta);
    double psi = 0.0;
    double cm = cb * cb;
    for (double a : p.axial) {
        psi += a * cm;
        cm *= cb;
    }
    if (!p.azimuthal.empty()) {
        double dT = 0.0;  // d/dalpha of the boundary trace
        for (const auto& m : p.azimuthal) {
            const double ca = std::cos(m.m * alpha), sa = std::sin(m.m * alpha);
            psi += std::pow(sb, m.m + 2) * (m.b * ca + m.c * sa);
            dT += m.m * (-m.b * sa + m.c * ca);
        }
        const double cot = std::cos(theta) / std::sin(theta);
        const double B = cot * (std::sqrt(1.0 + dT * dT) - 1.0);
        const double chi = smooth_step((beta - 0.25 * kPi) / (0.25 * kPi));
        psi += (beta - 0.5 * kPi) * chi * B;
    }
    return psi;
}

ScalarField perturbed_cap(const Grid& grid, const CapSpec& cap, const Perturbation& p) {
    RadialGraph rg = cap_graph(cap, grid);
    for (int j = 0; j < grid.nb; ++j)
        for (int k = 0; k < grid.na; ++k) {
            const double alpha = grid.full2d() ? grid.alpha[k] : 0.0;
            rg.phi[grid.index(j, k)] += perturbation_value(p, cap.theta, grid.beta[j], alpha);
        }
    return rg.phi;
}

Perturbation random_perturbation(std::mt19937_64& rng, double eps, bool azimuthal, int min_azimuthal_order) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Perturbation p;
    p.axial.resize(4);  // cos^2 .. cos^5
    double norm2 = 0.0;
    for (double& a : p.axial) {
        a = normal(rng);
        norm2 += a * a;
    }
    if (azimuthal) {
        for (int m = std::max(1, min_azimuthal_order); m <= 3; ++m) {
            Perturbation::Harmonic mode{m, normal(rng), normal(rng)};
            norm2 += mode.b * mode.b + mode.c * mode.c;
            p.azimuthal.push_back(mode);
        }
    }
    const double s = eps / std::sqrt(norm2);
    for (double& a : p.axial) a *= s;
    for (auto& m : p.azimuthal) {
        m.b *= s;
        m.c *= s;
    }
    return p;
}

Perturbation named_perturbation(int shape, double eps) {
    Perturbation p;
    switch (shape) {
        case 1:  // eps cos^2(beta) cos(2 beta)
            p.axial = {-eps, 0.0, 2.0 * eps};
            break;
        case 2:  // eps cos^3(beta)
            p.axial = {0.0, eps};
            break;
        case 3:  // eps cos^2(beta) sin^2(beta)
            p.axial = {eps, 0.0, -eps};
            break;
        case 4:  // eps sin^4(beta) cos(2 alpha), Full2D only
            p.azimuthal = {{2, eps, 0.0}};
            break;
        case 5:  // eps cos^2(beta) + (eps/2) sin^5(beta) sin(3 alpha), Full2D only
            p.axial = {eps};
            p.azimuthal = {{3, 0.0, 0.5 * eps}};
            break;
        default:
            throw std::invalid_argument("unknown perturbation shape " + std::to_string(shape));
    }
    return p;
}

ScalarField initial_phi(const Grid& grid, double theta, const InitialSpec& spec, std::uint64_t seed) {
    const CapSpec cap{theta, spec.r};
    if (spec.kind == "cap") return cap_graph(cap, grid).phi;
    if (spec.kind == "perturbed") {
        const Perturbation p = named_perturbation(spec.shape, spec.eps);
        if (!p.azimuthal.empty() && !grid.full2d())
            throw std::invalid_argument("perturbation shape " + std::to_string(spec.shape) + " needs full2d mode");
        return perturbed_cap(grid, cap, p);
    }
    if (spec.kind == "random") {
        std::mt19937_64 rng(seed);
        return perturbed_cap(grid, cap, random_perturbation(rng, spec.eps, grid.full2d(), 2));
    }
    if (spec.kind == "sphere") return ScalarField(grid.size(), std::log(spec.r));
    if (spec.kind == "ellipsoid") {
        ScalarField phi = ellipsoid_graph(spec.eps, grid).phi;
        for (double& x : phi) x += std::log(spec.r);
        return phi;
    }
    throw std::invalid_argument("unknown initial kind '" + spec.kind + "'");
}

}  // namespace capflow
