#include "capflow/oracle.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace capflow {

namespace {

constexpr double kPi = std::numbers::pi;

double tanh_sinh(const auto& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, a, b, 1e-10);
}

}  // namespace

double cap_rho(const CapSpec& cap, double beta) {
    // Positive root of rho^2 + 2 r cos(theta) cos(beta) rho - r^2 sin^2(theta) = 0.
    const double ct = std::cos(cap.theta);
    const double sb = std::sin(beta), cb = std::cos(beta);
    return cap.r * (-ct * cb + std::sqrt(1.0 - ct * ct * sb * sb));
}

CapJet cap_jet(const CapSpec& cap, double beta) {
    const double ct = std::cos(cap.theta), r = cap.r;
    const double sb = std::sin(beta), cb = std::cos(beta);
    const double q = 1.0 - ct * ct * sb * sb;
    const double sq = std::sqrt(q);
    const double dq = -2.0 * ct * ct * sb * cb;
    const double d2q = -2.0 * ct * ct * (cb * cb - sb * sb);
    CapJet j;
    j.rho = r * (-ct * cb + sq);
    j.drho = r * (ct * sb + 0.5 * dq / sq);
    j.d2rho = r * (ct * cb + 0.5 * d2q / sq - 0.25 * dq * dq / (q * sq));
    j.phi = std::log(j.rho);
    j.dphi = j.drho / j.rho;
    j.d2phi = j.d2rho / j.rho - j.dphi * j.dphi;
    return j;
}

RadialGraph cap_graph(const CapSpec& cap, const Grid& grid) {
    if (!(cap.theta > 0.0 && cap.theta < kPi)) throw std::invalid_argument("theta out of (0, pi)");
    if (!(cap.r > 0.0)) throw std::invalid_argument("cap radius must be positive");
    RadialGraph rg{grid, ScalarField(grid.size()), cap.theta};
    for (int j = 0; j < grid.nb; ++j) {
        const double phi = std::log(cap_rho(cap, grid.beta[j]));
        for (int k = 0; k < grid.na; ++k) rg.phi[grid.index(j, k)] = phi;
    }
    return rg;
}

CapFunctionals cap_functionals(const CapSpec& cap, int n) {
    const double th = cap.theta, r = cap.r;
    const double ct = std::cos(th), st = std::sin(th);
    CapFunctionals out;
    out.n = n;

    // Unit-radius ingredients: spherical area of the cap, its boundary
    // sphere S^{n-1} of radius sin(theta), the wetted disc and the volume.
    double sphere, bdry, disc, vol;
    if (n == 2) {
        sphere = 2.0 * kPi * (1.0 - ct);
        bdry = 2.0 * kPi * st;
        disc = kPi * st * st;
        vol = kPi * (1.0 - ct) * (1.0 - ct) * (2.0 + ct) / 3.0;
    } else {
        const double s_nm1 = 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);  // |S^{n-1}|
        const double b_n = std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);    // |B^n|
        sphere = s_nm1 * tanh_sinh([n](double t) { return std::pow(std::sin(t), n - 1); }, 0.0, th);
        bdry = s_nm1 * std::pow(st, n - 1);
        disc = b_n * std::pow(st, n);
        // Volume by horizontal slices: radius sqrt(1 - z^2) above height cos(theta).
        vol = tanh_sinh([&](double z) { return b_n * std::pow(std::max(0.0, 1.0 - z * z), 0.5 * n); }, ct, 1.0);
    }
    out.b_theta = vol;
    out.area = sphere * std::pow(r, n);
    out.boundary_length = bdry * std::pow(r, n - 1);
    out.wetted_area = disc * std::pow(r, n);

    // Quermassintegrals from their defining formula on the cap: H_k = r^{-k}
    // on the sphere, the boundary is a round sphere of radius r sin(theta).
    out.V.assign(n + 2, 0.0);
    out.V[0] = vol * std::pow(r, n + 1);
    out.V[1] = (out.area - ct * out.wetted_area) / (n + 1);
    for (int k = 1; k <= n; ++k) {
        const double interior = std::pow(r, -k) * out.area;
        const double rb = r * st;
        const double boundary = ct * std::pow(st, k) / n * out.boundary_length * std::pow(rb, -(k - 1));
        out.V[k + 1] = (interior - boundary) / (n + 1);
    }
    return out;
}

double convergence_order(const std::vector<double>& errors) {
    std::vector<double> steps(errors.size());
    for (std::size_t i = 0; i < steps.size(); ++i) steps[i] = std::ldexp(1.0, -static_cast<int>(i));
    return convergence_order(errors, steps);
}

double convergence_order(const std::vector<double>& errors, const std::vector<double>& steps) {
    if (errors.size() < 3) throw std::invalid_argument("convergence_order needs at least three levels");
    if (steps.size() != errors.size()) throw std::invalid_argument("convergence_order: errors and steps differ in length");
    for (double e : errors)
        if (!(e > 0.0)) return std::numeric_limits<double>::infinity();
    const double m = static_cast<double>(errors.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        const double x = std::log(steps[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

double ellipsoid_rho(double eps, double beta) {
    const double cb = std::cos(beta);
    return 1.0 / std::sqrt(1.0 + eps * cb * cb);
}

RadialGraph ellipsoid_graph(double eps, const Grid& grid) {
    RadialGraph rg{grid, ScalarField(grid.size()), 0.5 * kPi};
    for (int j = 0; j < grid.nb; ++j) {
        const double phi = std::log(ellipsoid_rho(eps, grid.beta[j]));
        for (int k = 0; k < grid.na; ++k) rg.phi[grid.index(j, k)] = phi;
    }
    return rg;
}

double ellipsoid_mean_curvature(double eps, int n, double x_perp, double z) {
    // Level set G = |x_perp|^2 + (1 + eps) z^2: H = div(grad G / |grad G|).
    const double c = 1.0 + eps;
    const double gp = 2.0 * x_perp, gz = 2.0 * c * z;
    const double g2 = gp * gp + gz * gz;
    const double trace = 2.0 * n + 2.0 * c;
    const double quad = 2.0 * gp * gp + 2.0 * c * gz * gz;
    return (g2 * trace - quad) / std::pow(g2, 1.5);
}

}  // namespace capflow
