#include "capflow/reference.hpp"

#include <cmath>

namespace capflow::reference {

namespace {

// beta-flux through the face between rows f and f+1.
double beta_flux(const Grid& g, const PaddedField& p, double ct, int f, int k) {
    const double h = g.dbeta;
    const double pm = p(f - 1, k), p0 = p(f, k), p1 = p(f + 1, k), p2 = p(f + 2, k);
    const double d = (pm - 27.0 * p0 + 27.0 * p1 - p2) / (24.0 * h);
    const double val = (-pm + 9.0 * p0 + 9.0 * p1 - p2) / 16.0;
    const double sf = g.face_sin[f];
    double t = 0.0;
    if (g.full2d())
        t = (-dalpha4(p, g, f - 1, k) + 9.0 * dalpha4(p, g, f, k) + 9.0 * dalpha4(p, g, f + 1, k) -
             dalpha4(p, g, f + 2, k)) /
            (16.0 * sf);
    const double v = std::sqrt(1.0 + d * d + t * t);
    return g.face_area[f] * std::exp(g.n * val) * (d / v - ct * sf);
}

// alpha-flux through the face between columns k and k+1 of row j.
double alpha_flux(const Grid& g, const PaddedField& p, int j, int k) {
    const double h = g.dbeta;
    const double s = g.sin_beta[j];
    const int k1 = (k + 1) % g.na;
    const double val = 0.5 * (p(j, k) + p(j, k1));
    const double fa = (p(j, k1) - p(j, k)) / (g.dalpha * s);
    const double fb = (p(j + 1, k) - p(j - 1, k) + p(j + 1, k1) - p(j - 1, k1)) / (4.0 * h);
    const double v = std::sqrt(1.0 + fa * fa + fb * fb);
    return std::exp(g.n * val) * fa / v;
}

}  // namespace

ScalarField scalar_rhs(const RadialGraph& rg) {
    const Grid& g = rg.grid;
    const PaddedField p = fill_ghost(rg.phi, rg.theta, g);
    const double ct = std::cos(rg.theta);
    const double h = g.dbeta;
    const int nb = g.nb, na = g.na;
    ScalarField F(g.size());
    for (int j = 0; j < nb; ++j) {
        const double abar = g.wbeta[j] / (g.closure[j] * h);
        for (int k = 0; k < na; ++k) {
            const double qm = j > 0 ? beta_flux(g, p, ct, j - 1, k) : 0.0;
            double D;
            if (j < nb - 1)
                D = (beta_flux(g, p, ct, j, k) - qm) / h;
            else
                D = (-9.0 * qm + beta_flux(g, p, ct, j - 2, k)) / (3.0 * h);
            double div = D / abar;
            if (g.full2d()) {
                const int km = (k + na - 1) % na;
                div += (alpha_flux(g, p, j, k) - alpha_flux(g, p, j, km)) / (g.sin_beta[j] * g.dalpha);
            }
            F[g.index(j, k)] = div * std::exp(-(g.n + 1) * p(j, k));
        }
    }
    return F;
}

ScalarField pointwise_rhs(const RadialGraph& rg) {
    const GeometryField geo = compute_geometry(rg);
    ScalarField F(rg.grid.size());
    for (std::size_t i = 0; i < F.size(); ++i) F[i] = geo.f[i] * geo.v[i] / geo.rho[i];
    return F;
}

double integrate(const ScalarField& f, const Grid& g) {
    double total = 0.0;
    for (int j = 0; j < g.nb; ++j) {
        double row = 0.0;
        for (int k = 0; k < g.na; ++k) row += f[g.index(j, k)];
        total += row * g.wbeta[j];
    }
    return total * g.azimuth_measure;
}

}  // namespace capflow::reference
