#include "capflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "parallel.hpp"

namespace capflow {

namespace {

struct Frame {
    Vec3 X, dX, ea;  // radial direction, d/dbeta, unit azimuthal direction
};

Frame frame_at(const Grid& g, int j, int k) {
    const double s = g.sin_beta[j], c = g.cos_beta[j];
    const double ca = g.full2d() ? g.cos_alpha[k] : 1.0;
    const double sa = g.full2d() ? g.sin_alpha[k] : 0.0;
    return {{s * ca, s * sa, c}, {c * ca, c * sa, -s}, {-sa, ca, 0.0}};
}

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void allocate(GeometryField& geo, const Grid& g, bool curvature) {
    const std::size_t N = g.size();
    geo.n = g.n;
    geo.mode = g.mode;
    for (auto* a : {&geo.phi_b, &geo.phi_a, &geo.v, &geo.rho, &geo.u, &geo.ubar, &geo.nu_e})
        a->assign(N, 0.0);
    geo.x.assign(N, Vec3{});
    geo.nu.assign(N, Vec3{});
    if (curvature) {
        for (auto* a : {&geo.H, &geo.Hbar, &geo.f}) a->assign(N, 0.0);
        geo.W.assign(N, Weingarten{});
        geo.kappa.assign(N * g.n, 0.0);
        geo.Hk.assign(N * (g.n + 1), 0.0);
        geo.convex.assign(N, 0);
    }
}

// Embedding quantities at one node from phi and its frame gradient.
void embed_node(GeometryField& geo, const Grid& g, double theta, int j, int k, double phi, double gb,
                double ga) {
    const std::size_t i = g.index(j, k);
    const Frame fr = frame_at(g, j, k);
    const double rho = std::exp(phi);
    const double v = std::sqrt(1.0 + gb * gb + ga * ga);
    Vec3 x, nu;
    for (int d = 0; d < 3; ++d) {
        x[d] = rho * fr.X[d];
        nu[d] = (fr.X[d] - gb * fr.dX[d] - ga * fr.ea[d]) / v;
    }
    geo.phi_b[i] = gb;
    geo.phi_a[i] = ga;
    geo.rho[i] = rho;
    geo.v[i] = v;
    geo.x[i] = x;
    geo.nu[i] = nu;
    geo.u[i] = dot(x, nu);
    geo.nu_e[i] = -nu[2];
    geo.ubar[i] = geo.u[i] / (1.0 + std::cos(theta) * geo.nu_e[i]);
}

}  // namespace

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<double> elementary_symmetric(const double* values, int m) {
    std::vector<double> e(m + 1, 0.0);
    e[0] = 1.0;
    for (int i = 0; i < m; ++i)
        for (int k = i + 1; k >= 1; --k) e[k] += e[k - 1] * values[i];
    return e;
}

std::vector<double> GeometryField::weingarten_matrix(std::size_t node) const {
    std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
    const Weingarten& w = W[node];
    m[0] = w.bb;
    if (mode == Mode::Full2D) {
        m[1] = w.ba;
        m[2] = w.ab;
        m[3] = w.aa;
    } else {
        for (int i = 1; i < n; ++i) m[static_cast<std::size_t>(i) * n + i] = w.aa;
    }
    return m;
}

GeometryField embed(const RadialGraph& rg) {
    const Grid& g = rg.grid;
    const PaddedField p = fill_ghost(rg.phi, rg.theta, g);
    const CovectorField grad = gradient(p, g);
    GeometryField geo;
    allocate(geo, g, false);
#pragma omp parallel for if (detail::go_parallel(g.size()))
    for (int j = 0; j < g.nb; ++j)
        for (int k = 0; k < g.na; ++k) {
            const std::size_t i = g.index(j, k);
            embed_node(geo, g, rg.theta, j, k, rg.phi[i], grad.b[i], grad.a[i]);
        }
    return geo;
}

GeometryField compute_geometry(const RadialGraph& rg) {
    return compute_geometry(rg, fill_ghost(rg.phi, rg.theta, rg.grid));
}

GeometryField compute_geometry(const RadialGraph& rg, const PaddedField& p) {
    const Grid& g = rg.grid;
    const int n = g.n;
    const double ct = std::cos(rg.theta);
    const CovectorField grad = gradient(p, g);
    const SymTensorField hess = hessian(p, g);
    GeometryField geo;
    allocate(geo, g, true);

#pragma omp parallel for if (detail::go_parallel(g.size()))
    for (int j = 0; j < g.nb; ++j) {
        std::vector<double> kap(n);
        for (int k = 0; k < g.na; ++k) {
            const std::size_t i = g.index(j, k);
            const double gb = grad.b[i], ga = grad.a[i];
            embed_node(geo, g, rg.theta, j, k, rg.phi[i], gb, ga);
            const double rho = geo.rho[i], v = geo.v[i];
            const double v2 = v * v;
            const double scale = 1.0 / (rho * v);

            // W = (I - M S) / (rho v) with M = I - grad grad^T / v^2.
            const double Sbb = hess.bb[i], Sba = hess.ba[i], Saa = hess.aa[i];
            const double Mbb = 1.0 - gb * gb / v2, Mba = -gb * ga / v2, Maa = 1.0 - ga * ga / v2;
            Weingarten w;
            w.bb = scale * (1.0 - (Mbb * Sbb + Mba * Sba));
            w.ba = scale * (-(Mbb * Sba + Mba * Saa));
            w.ab = scale * (-(Mba * Sbb + Maa * Sba));
            w.aa = scale * (1.0 - (Mba * Sba + Maa * Saa));
            geo.W[i] = w;

            if (g.full2d()) {
                // Similar symmetric matrix M^{1/2} S M^{1/2}; M^{1/2} shrinks
                // the gradient direction by 1/v.
                const double gn2 = gb * gb + ga * ga;
                double Rbb = 1.0, Rba = 0.0, Raa = 1.0;
                if (gn2 > 0.0) {
                    const double c = (1.0 - 1.0 / v) / gn2;
                    Rbb = 1.0 - c * gb * gb;
                    Rba = -c * gb * ga;
                    Raa = 1.0 - c * ga * ga;
                }
                // T = R S R
                const double Tbb0 = Rbb * Sbb + Rba * Sba, Tba0 = Rbb * Sba + Rba * Saa;
                const double Tab0 = Rba * Sbb + Raa * Sba, Taa0 = Rba * Sba + Raa * Saa;
                const double Tbb = Tbb0 * Rbb + Tba0 * Rba;
                const double Tba = Tbb0 * Rba + Tba0 * Raa;
                const double Taa = Tab0 * Rba + Taa0 * Raa;
                const double mean = 0.5 * (Tbb + Taa);
                const double rad = std::hypot(0.5 * (Tbb - Taa), Tba);
                // Larger eigenvalue of T gives the smaller curvature.
                kap[0] = scale * (1.0 - (mean + rad));
                kap[1] = scale * (1.0 - (mean - rad));
            } else {
                kap[0] = w.bb;
                for (int d = 1; d < n; ++d) kap[d] = w.aa;
            }

            // sigma_k(kappa) accumulated in place (no per-node allocation).
            double* Hk = &geo.Hk[i * (n + 1)];
            Hk[0] = 1.0;
            for (int d = 0; d < n; ++d) {
                Hk[d + 1] = 0.0;
                for (int kk = d + 1; kk >= 1; --kk) Hk[kk] += Hk[kk - 1] * kap[d];
            }
            double H = 0.0, hbar = 0.0;
            bool convex = true;
            for (int d = 0; d < n; ++d) {
                geo.kappa[i * n + d] = kap[d];
                H += kap[d];
                if (kap[d] > 0.0)
                    hbar += 1.0 / kap[d];
                else
                    convex = false;
            }
            for (int kk = 1; kk <= n; ++kk) Hk[kk] /= binomial(n, kk);
            geo.H[i] = H;
            geo.Hbar[i] = convex ? hbar : std::numeric_limits<double>::infinity();
            geo.convex[i] = convex ? 1 : 0;
            geo.f[i] = n * (1.0 + ct * geo.nu_e[i]) - H * geo.u[i];
        }
    }
    return geo;
}

ScalarField speed(const RadialGraph& rg) { return compute_geometry(rg).f; }

ScalarField scalar_rhs(const RadialGraph& rg) { return scalar_rhs(rg.grid, rg.theta, fill_ghost(rg.phi, rg.theta, rg.grid)); }

ScalarField scalar_rhs(const RadialGraph& rg, const PaddedField& p) { return scalar_rhs(rg.grid, rg.theta, p); }

ScalarField scalar_rhs(const Grid& g, double theta, const PaddedField& p) {
    // rho^{n+1} F = div( rho^n grad phi / v - cos(theta) sin(beta) rho^n d_beta ).
    // beta-fluxes use fourth-order face interpolation; the capillary
    // condition makes the normal flux vanish at beta = pi/2 and the pole
    // face carries no flux.
    const int n = g.n, nb = g.nb, na = g.na;
    const double h = g.dbeta;
    const double ct = std::cos(theta);
    const bool full = g.full2d();

    // Fourth-order azimuthal derivative on every padded row.
    PaddedField pa;
    if (full) {
        pa = PaddedField(g);
#pragma omp parallel for if (detail::go_parallel(g.size()))
        for (int j = -1; j <= nb; ++j)
            for (int k = 0; k < na; ++k) pa(j, k) = dalpha4(p, g, j, k);
    }

    std::vector<double> q(static_cast<std::size_t>(nb - 1) * na);
#pragma omp parallel for if (detail::go_parallel(g.size()))
    for (int f = 0; f < nb - 1; ++f) {
        const double sf = g.face_sin[f];
        for (int k = 0; k < na; ++k) {
            const double pm = p(f - 1, k), p0 = p(f, k), p1 = p(f + 1, k), p2 = p(f + 2, k);
            const double d = (pm - 27.0 * p0 + 27.0 * p1 - p2) / (24.0 * h);
            const double val = (-pm + 9.0 * p0 + 9.0 * p1 - p2) / 16.0;
            double t = 0.0;
            if (full) t = (-pa(f - 1, k) + 9.0 * pa(f, k) + 9.0 * pa(f + 1, k) - pa(f + 2, k)) / (16.0 * sf);
            const double v = std::sqrt(1.0 + d * d + t * t);
            q[static_cast<std::size_t>(f) * na + k] = g.face_area[f] * std::exp(n * val) * (d / v - ct * sf);
        }
    }

    ScalarField F(g.size());
#pragma omp parallel for if (detail::go_parallel(g.size()))
    for (int j = 0; j < nb; ++j) {
        const double abar = g.wbeta[j] / (g.closure[j] * h);
        const double s = g.sin_beta[j];
        std::vector<double> za;
        if (full) {
            // Azimuthal fluxes at alpha_{k+1/2}, second order.
            za.resize(na);
            for (int k = 0; k < na; ++k) {
                const int k1 = (k + 1) % na;
                const double val = 0.5 * (p(j, k) + p(j, k1));
                const double fa = (p(j, k1) - p(j, k)) / (g.dalpha * s);
                const double fb = (p(j + 1, k) - p(j - 1, k) + p(j + 1, k1) - p(j - 1, k1)) / (4.0 * h);
                const double v = std::sqrt(1.0 + fa * fa + fb * fb);
                za[k] = std::exp(n * val) * fa / v;
            }
        }
        for (int k = 0; k < na; ++k) {
            const double qm = j > 0 ? q[static_cast<std::size_t>(j - 1) * na + k] : 0.0;
            double D;
            if (j < nb - 1) {
                D = (q[static_cast<std::size_t>(j) * na + k] - qm) / h;
            } else {
                D = (-9.0 * qm + q[static_cast<std::size_t>(j - 2) * na + k]) / (3.0 * h);
            }
            double div = D / abar;
            if (full) div += (za[k] - za[(k + na - 1) % na]) / (s * g.dalpha);
            const std::size_t i = g.index(j, k);
            F[i] = div * std::exp(-(n + 1) * p(j, k));
        }
    }
    return F;
}

BoundaryDiagnostics boundary_diagnostics(const RadialGraph& rg, const GeometryField& geo) {
    const Grid& g = rg.grid;
    const int b = g.boundary_row();
    const double h = g.dbeta;
    const double ct = std::cos(rg.theta), st = std::sin(rg.theta);
    BoundaryDiagnostics out;

    auto dbeta = [&](const std::vector<double>& F, int k) {
        return (3.0 * F[g.index(b, k)] - 4.0 * F[g.index(b - 1, k)] + F[g.index(b - 2, k)]) / (2.0 * h);
    };
    auto dalpha = [&](const std::vector<double>& F, int k) {
        if (!g.full2d()) return 0.0;
        const int kp = (k + 1) % g.na, km = (k + g.na - 1) % g.na;
        return (F[g.index(b, kp)] - F[g.index(b, km)]) / (2.0 * g.dalpha);
    };

    for (int k = 0; k < g.na; ++k) {
        const std::size_t i = g.index(b, k);
        const Frame fr = frame_at(g, b, k);
        const double rho = geo.rho[i];
        // Co-normal from e = sin(theta) mu - cos(theta) nu.
        Vec3 mu;
        const Vec3 e{0.0, 0.0, -1.0};
        for (int d = 0; d < 3; ++d) mu[d] = (e[d] + ct * geo.nu[i][d]) / st;
        // Tangent vectors dx(e_beta), dx(e_alpha).
        Vec3 t1, t2;
        for (int d = 0; d < 3; ++d) {
            t1[d] = rho * (fr.dX[d] + geo.phi_b[i] * fr.X[d]);
            t2[d] = rho * (fr.ea[d] + geo.phi_a[i] * fr.X[d]);
        }
        const double g11 = dot(t1, t1), g12 = dot(t1, t2), g22 = dot(t2, t2);
        const double r1 = dot(mu, t1), r2 = dot(mu, t2);
        double c1, c2;
        if (g.full2d()) {
            const double det = g11 * g22 - g12 * g12;
            c1 = (g22 * r1 - g12 * r2) / det;
            c2 = (g11 * r2 - g12 * r1) / det;
        } else {
            c1 = r1 / g11;
            c2 = 0.0;
        }
        const double du = c1 * dbeta(geo.ubar, k) + c2 * dalpha(geo.ubar, k);
        const double dH = c1 * dbeta(geo.H, k) + c2 * dalpha(geo.H, k);
        out.dmu_ubar = std::max(out.dmu_ubar, std::abs(du));
        out.dmu_H = std::max(out.dmu_H, std::abs(dH));
        out.contact = std::max(out.contact, std::abs(geo.nu_e[i] + ct));
    }
    return out;
}

}  // namespace capflow
