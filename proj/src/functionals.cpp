#include "capflow/functionals.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace capflow {

namespace {

constexpr double kPi = std::numbers::pi;

// Node-wise area element density rho^n v (to be integrated against dsigma).
ScalarField area_density(const RadialGraph& rg, const GeometryField& geo) {
    const int n = rg.grid.n;
    ScalarField a(rg.grid.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(geo.rho[i], n) * geo.v[i];
    return a;
}

std::vector<double> boundary_radius(const RadialGraph& rg) {
    auto ring = boundary_ring(rg.phi, rg.grid);
    for (double& r : ring) r = std::exp(r);
    return ring;
}

double adaptive(const auto& f, double a, double b) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13, &err);
}

}  // namespace

double surface_area(const RadialGraph& rg, const GeometryField& geo) {
    return integrate(area_density(rg, geo), rg.grid);
}

double enclosed_volume(const RadialGraph& rg) {
    const int n = rg.grid.n;
    ScalarField c(rg.phi.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::exp((n + 1) * rg.phi[i]) / (n + 1);
    return integrate(c, rg.grid);
}

double wetted_area(const RadialGraph& rg) {
    const Grid& g = rg.grid;
    const auto R = boundary_radius(rg);
    if (!g.full2d()) return unit_ball_volume(g.n) * std::pow(R[0], g.n);
    // Green's theorem for the radial curve R(alpha): (1/2) int R^2 dalpha.
    double s = 0.0;
    for (double r : R) s += r * r;
    return 0.5 * s * g.dalpha;
}

double boundary_length(const RadialGraph& rg) {
    const Grid& g = rg.grid;
    const auto R = boundary_radius(rg);
    if (!g.full2d()) return unit_sphere_area(g.n - 1) * std::pow(R[0], g.n - 1);
    const PaddedField p = pad_interior(rg.phi, g);
    const int b = g.boundary_row();
    double s = 0.0;
    for (int k = 0; k < g.na; ++k) {
        const double dR = R[k] * dalpha4(p, g, b, k);
        s += std::hypot(R[k], dR);
    }
    return s * g.dalpha;
}

double boundary_curvature_integral(const RadialGraph& rg, int k) {
    const Grid& g = rg.grid;
    if (k < 1 || k > g.n) throw std::invalid_argument("boundary curvature order out of range");
    if (k == 1) return boundary_length(rg);
    const auto R = boundary_radius(rg);
    if (!g.full2d()) {
        // The boundary is a round (n-1)-sphere of radius R_b.
        return unit_sphere_area(g.n - 1) * std::pow(R[0], g.n - 1 - (k - 1));
    }
    // n = 2, k = 2: total curvature of the planar boundary curve from the
    // turning angle of its tangent.
    const PaddedField p = pad_interior(rg.phi, g);
    const int b = g.boundary_row();
    std::vector<double> psi(g.na);
    for (int j = 0; j < g.na; ++j) {
        const double dR = R[j] * dalpha4(p, g, b, j);
        const double ca = g.cos_alpha[j], sa = g.sin_alpha[j];
        psi[j] = std::atan2(dR * sa + R[j] * ca, dR * ca - R[j] * sa);
    }
    double turn = 0.0;
    for (int j = 0; j < g.na; ++j) {
        double d = psi[(j + 1) % g.na] - psi[j];
        d = std::remainder(d, 2.0 * kPi);
        turn += d;
    }
    return turn;
}

double quermassintegral(const RadialGraph& rg, const GeometryField& geo, int k) {
    const int n = rg.grid.n;
    if (k < 0 || k > n + 1) throw std::invalid_argument("quermassintegral index out of range");
    if (k == 0) return enclosed_volume(rg);
    const double ct = std::cos(rg.theta), st = std::sin(rg.theta);
    if (k == 1) return (surface_area(rg, geo) - ct * wetted_area(rg)) / (n + 1);
    const int m = k - 1;  // V_{m+1} uses H_m
    ScalarField a = area_density(rg, geo);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= geo.Hk_at(i, m);
    const double interior = integrate(a, rg.grid);
    const double boundary = ct * std::pow(st, m) / n * boundary_curvature_integral(rg, m);
    return (interior - boundary) / (n + 1);
}

double minkowski_residual(const RadialGraph& rg, const GeometryField& geo, int k) {
    const int n = rg.grid.n;
    if (k < 1 || k > n) throw std::invalid_argument("Minkowski order out of range");
    const double ct = std::cos(rg.theta);
    ScalarField a = area_density(rg, geo);
    for (std::size_t i = 0; i < a.size(); ++i)
        a[i] *= geo.Hk_at(i, k - 1) * (1.0 + ct * geo.nu_e[i]) - geo.Hk_at(i, k) * geo.u[i];
    return integrate(a, rg.grid);
}

double static_residual(const RadialGraph& rg, const GeometryField& geo) {
    const double ct = std::cos(rg.theta);
    const int n = rg.grid.n;
    double r = 0.0;
    for (std::size_t i = 0; i < geo.u.size(); ++i)
        r = std::max(r, std::abs(1.0 + ct * geo.nu_e[i] - geo.H[i] / n * geo.u[i]));
    return r;
}

ReferenceConstants reference_constants(double theta, int n) {
    if (!(theta > 0.0 && theta < kPi)) throw std::invalid_argument("theta out of (0, pi)");
    if (n < 2) throw std::invalid_argument("dimension n must be at least 2");
    ReferenceConstants c;
    c.theta = theta;
    c.n = n;
    const double ct = std::cos(theta), st = std::sin(theta);
    if (n == 2) {
        c.b_theta = kPi * (1.0 - ct) * (1.0 - ct) * (2.0 + ct) / 3.0;
        c.cap_sphere_area = 2.0 * kPi * (1.0 - ct);
        c.cap_disc_area = kPi * st * st;
        return c;
    }
    // Unit cap: slices of the unit ball above height cos(theta).
    const double ball = unit_ball_volume(n);
    c.b_theta = adaptive([&](double z) { return ball * std::pow(std::max(0.0, 1.0 - z * z), 0.5 * n); }, ct, 1.0);
    c.cap_sphere_area =
        unit_sphere_area(n - 1) * adaptive([&](double t) { return std::pow(std::sin(t), n - 1); }, 0.0, theta);
    c.cap_disc_area = ball * std::pow(st, n);
    return c;
}

InequalityRatios inequality_ratios(const FunctionalReport& report, const ReferenceConstants& c, int n) {
    InequalityRatios out;
    const double b = c.b_theta;
    const double base = std::pow(report.V[0] / b, 1.0 / (n + 1));
    out.af_ratio.resize(n);
    for (int k = 1; k <= n; ++k) out.af_ratio[k - 1] = std::pow(report.V[k] / b, 1.0 / (n + 1 - k)) / base;
    out.iso_ratio = out.af_ratio[0];
    const double lhs = report.total_mean_curvature - std::sin(c.theta) * std::cos(c.theta) * report.boundary_length;
    out.minkowski_rhs = n * (n + 1) * std::pow(b, 2.0 / (n + 1)) * std::pow(report.V[0], (n - 1.0) / (n + 1));
    out.minkowski_gap = lhs - out.minkowski_rhs;
    return out;
}

FittedCap fit_cap(const RadialGraph& rg, const GeometryField& geo) {
    // Caps around e: |x + r cos(theta) E_{n+1}| = r.  The geometric
    // residual is not linear in r, so the one-dimensional least-squares
    // problem is solved by Gauss-Newton.
    const Grid& g = rg.grid;
    const double ct = std::cos(rg.theta);
    const ScalarField dA = area_density(rg, geo);
    std::vector<double> w(g.size());
    double wsum = 0.0, r2 = 0.0;
    for (int j = 0; j < g.nb; ++j)
        for (int k = 0; k < g.na; ++k) {
            const std::size_t i = g.index(j, k);
            w[i] = g.weight(j) * dA[i];
            wsum += w[i];
            r2 += w[i] * (geo.x[i][0] * geo.x[i][0] + geo.x[i][1] * geo.x[i][1] + geo.x[i][2] * geo.x[i][2]);
        }
    if (!(wsum > 0.0) || !(r2 > 0.0)) throw std::invalid_argument("cap fit: degenerate surface");

    auto residuals = [&](double r, double& num, double& den, double& ss) {
        num = den = ss = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const auto& x = geo.x[i];
            const double zc = x[2] + r * ct;
            const double D = std::sqrt(x[0] * x[0] + x[1] * x[1] + zc * zc);
            const double d = D - r;
            const double dd = (D > 0.0 ? ct * zc / D : 0.0) - 1.0;
            num += w[i] * d * dd;
            den += w[i] * dd * dd;
            ss += w[i] * d * d;
        }
    };

    double r = std::sqrt(r2 / wsum);
    double num, den, ss;
    for (int it = 0; it < 100; ++it) {
        residuals(r, num, den, ss);
        const double step = num / den;
        r -= step;
        if (std::abs(step) <= 1e-15 * std::abs(r)) break;
    }
    residuals(r, num, den, ss);
    return {r, std::sqrt(ss / wsum)};
}

FreeCenterCap fit_cap_free_center(const RadialGraph& rg, const GeometryField& geo) {
    // |x - c E|^2 = R^2  <=>  |x|^2 = 2 c z + (R^2 - c^2): linear in (2c, R^2 - c^2).
    const Grid& g = rg.grid;
    const ScalarField dA = area_density(rg, geo);
    double S = 0, Sz = 0, Szz = 0, Sq = 0, Szq = 0;
    std::vector<double> w(g.size());
    for (int j = 0; j < g.nb; ++j)
        for (int k = 0; k < g.na; ++k) {
            const std::size_t i = g.index(j, k);
            const auto& x = geo.x[i];
            w[i] = g.weight(j) * dA[i];
            const double q = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            S += w[i];
            Sz += w[i] * x[2];
            Szz += w[i] * x[2] * x[2];
            Sq += w[i] * q;
            Szq += w[i] * x[2] * q;
        }
    const double det = Szz * S - Sz * Sz;
    if (!(S > 0.0) || std::abs(det) <= 1e-300) throw std::invalid_argument("cap fit: degenerate surface");
    const double a = (Szq * S - Sz * Sq) / det;
    const double c0 = (Szz * Sq - Sz * Szq) / det;
    FreeCenterCap out;
    out.center_z = 0.5 * a;
    out.radius = std::sqrt(c0 + out.center_z * out.center_z);
    double ss = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const auto& x = geo.x[i];
        const double zc = x[2] - out.center_z;
        const double d = std::sqrt(x[0] * x[0] + x[1] * x[1] + zc * zc) - out.radius;
        ss += w[i] * d * d;
    }
    out.rms = std::sqrt(ss / S);
    return out;
}

FunctionalReport make_report(const RadialGraph& rg, double t) { return make_report(rg, compute_geometry(rg), t); }

FunctionalReport make_report(const RadialGraph& rg, const GeometryField& geo, double t) {
    const Grid& g = rg.grid;
    const int n = g.n;
    FunctionalReport rep;
    rep.t = t;
    rep.area = surface_area(rg, geo);
    rep.boundary_length = boundary_length(rg);
    rep.wetted_area = wetted_area(rg);
    {
        ScalarField a = area_density(rg, geo);
        for (std::size_t i = 0; i < a.size(); ++i) a[i] *= geo.H[i];
        rep.total_mean_curvature = integrate(a, g);
    }
    rep.V.resize(n + 2);
    for (int k = 0; k <= n + 1; ++k) rep.V[k] = quermassintegral(rg, geo, k);
    rep.mink_residual.resize(n);
    for (int k = 1; k <= n; ++k) rep.mink_residual[k - 1] = minkowski_residual(rg, geo, k);
    rep.static_residual = static_residual(rg, geo);

    const auto ratios = inequality_ratios(rep, reference_constants(rg.theta, n), n);
    rep.iso_ratio = ratios.iso_ratio;
    rep.af_ratio = ratios.af_ratio;
    rep.minkowski_gap = ratios.minkowski_gap;

    rep.min_u = *std::min_element(geo.u.begin(), geo.u.end());
    rep.min_kappa = *std::min_element(geo.kappa.begin(), geo.kappa.end());
    rep.max_H = *std::max_element(geo.H.begin(), geo.H.end());
    rep.bc_residual = boundary_diagnostics(rg, geo).contact;

    const ScalarField F = scalar_rhs(rg);
    for (double x : F) rep.max_F = std::max(rep.max_F, std::abs(x));
    rep.fitted_cap = fit_cap(rg, geo);
    return rep;
}

}  // namespace capflow
