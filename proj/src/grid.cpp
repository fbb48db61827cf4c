#include "capflow/grid.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "parallel.hpp"

namespace capflow {

namespace {

constexpr double kPi = std::numbers::pi;

double sin_power_integral(int m, double a, double b) {
    // Cells are O(h) wide and the integrand is smooth, so a fixed 20-point
    // Gauss-Legendre rule is exact to round-off.
    auto f = [m](double x) { return std::pow(std::sin(x), m); };
    return boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
}

}  // namespace

std::string to_string(Mode m) { return m == Mode::Full2D ? "full2d" : "axisym"; }

Mode mode_from_string(const std::string& s) {
    if (s == "full2d") return Mode::Full2D;
    if (s == "axisym") return Mode::Axisym;
    throw GridError("unknown mode '" + s + "' (expected axisym or full2d)");
}

double unit_sphere_area(int dim) {
    const double a = 0.5 * (dim + 1);
    return 2.0 * std::pow(kPi, a) / std::tgamma(a);
}

double unit_ball_volume(int dim) {
    const double a = 0.5 * dim;
    return std::pow(kPi, a) / std::tgamma(a + 1.0);
}

Grid build_grid(Mode mode, int n, int n_beta, int n_alpha) {
    if (n < 2) throw GridError("dimension n must be at least 2");
    if (n_beta < 8) throw GridError("n_beta must be at least 8");
    if (mode == Mode::Full2D) {
        if (n != 2) throw GridError("full2d mode requires n = 2");
        if (n_alpha < 8) throw GridError("n_alpha must be at least 8");
        if (n_alpha % 2 != 0) throw GridError("n_alpha must be even (pole reflection pairs alpha with alpha + pi)");
    } else {
        n_alpha = 1;
    }

    Grid g;
    g.mode = mode;
    g.n = n;
    g.nb = n_beta;
    g.na = n_alpha;
    g.dbeta = (0.5 * kPi) / (n_beta - 0.5);
    g.beta0 = 0.5 * g.dbeta;
    g.dalpha = mode == Mode::Full2D ? 2.0 * kPi / n_alpha : 0.0;
    g.azimuth_measure = mode == Mode::Full2D ? g.dalpha : unit_sphere_area(n - 1);

    const double h = g.dbeta;
    g.beta.resize(n_beta);
    g.sin_beta.resize(n_beta);
    g.cos_beta.resize(n_beta);
    for (int j = 0; j < n_beta; ++j) {
        g.beta[j] = (j + 0.5) * h;
        g.sin_beta[j] = std::sin(g.beta[j]);
        g.cos_beta[j] = std::cos(g.beta[j]);
    }
    g.beta[n_beta - 1] = 0.5 * kPi;
    g.sin_beta[n_beta - 1] = 1.0;
    g.cos_beta[n_beta - 1] = 0.0;

    g.alpha.resize(g.na);
    g.sin_alpha.resize(g.na);
    g.cos_alpha.resize(g.na);
    for (int k = 0; k < g.na; ++k) {
        g.alpha[k] = k * g.dalpha;
        g.sin_alpha[k] = std::sin(g.alpha[k]);
        g.cos_alpha[k] = std::cos(g.alpha[k]);
    }

    // Interior rows own the exact cell integral of sin^{n-1}.  The last
    // 3h/2 of the interval is shared by the final two rows so that the
    // zeroth and first moments are reproduced exactly.
    const int m = n - 1;
    g.wbeta.assign(n_beta, 0.0);
    for (int j = 0; j < n_beta - 2; ++j) g.wbeta[j] = sin_power_integral(m, j * h, (j + 1) * h);
    const double a = 0.5 * kPi - 1.5 * h;
    const double m0 = sin_power_integral(m, a, 0.5 * kPi);
    auto first = [m](double x) { return (x - 0.5 * kPi) * std::pow(std::sin(x), m); };
    const double m1 = boost::math::quadrature::gauss<double, 20>::integrate(first, a, 0.5 * kPi);
    g.wbeta[n_beta - 2] = -m1 / h;
    g.wbeta[n_beta - 1] = m0 - g.wbeta[n_beta - 2];

    g.face_sin.resize(n_beta - 1);
    g.face_area.resize(n_beta - 1);
    for (int j = 0; j + 1 < n_beta; ++j) {
        g.face_sin[j] = std::sin((j + 1) * h);
        g.face_area[j] = std::pow(g.face_sin[j], m);
    }

    g.closure.assign(n_beta, 1.0);
    g.closure[n_beta - 2] = 9.0 / 8.0;
    g.closure[n_beta - 1] = 3.0 / 8.0;
    return g;
}

PaddedField pad_interior(const ScalarField& f, const Grid& g) {
    if (f.size() != g.size()) throw GridError("field size does not match grid");
    PaddedField p(g);
    for (int j = 0; j < g.nb; ++j)
        for (int k = 0; k < g.na; ++k) p(j, k) = f[g.index(j, k)];
    // Smoothness across the pole: (-beta, alpha) is the point (beta, alpha + pi).
    const int shift = g.full2d() ? g.na / 2 : 0;
    for (int k = 0; k < g.na; ++k) p(-1, k) = p(0, (k + shift) % g.na);
    return p;
}

PaddedField pad_extrapolated(const ScalarField& f, const Grid& g) {
    PaddedField p = pad_interior(f, g);
    const int b = g.boundary_row();
    for (int k = 0; k < g.na; ++k)
        p(b + 1, k) = 4.0 * p(b, k) - 6.0 * p(b - 1, k) + 4.0 * p(b - 2, k) - p(b - 3, k);
    return p;
}

double dalpha4(const PaddedField& f, const Grid& g, int j, int k) {
    return (f.wrap(j, k - 2) - 8.0 * f.wrap(j, k - 1) + 8.0 * f.wrap(j, k + 1) - f.wrap(j, k + 2)) /
           (12.0 * g.dalpha);
}

namespace {

std::vector<double> slope_from_padded(const PaddedField& p, double theta, const Grid& g) {
    const double cot = std::cos(theta) / std::sin(theta);
    std::vector<double> slope(g.na, cot);
    if (g.full2d()) {
        const int b = g.boundary_row();
        for (int k = 0; k < g.na; ++k) {
            const double t = dalpha4(p, g, b, k);  // sin(pi/2) = 1
            slope[k] = cot * std::sqrt(1.0 + t * t);
        }
    }
    return slope;
}

}  // namespace

std::vector<double> capillary_slope(const ScalarField& phi, double theta, const Grid& g) {
    return slope_from_padded(pad_interior(phi, g), theta, g);
}

PaddedField fill_ghost(const ScalarField& phi, double theta, const Grid& g) {
    if (!(theta > 0.0 && theta < kPi)) throw GridError("theta out of (0, pi)");
    PaddedField p = pad_interior(phi, g);
    const auto slope = slope_from_padded(p, theta, g);
    const int b = g.boundary_row();
    const double h = g.dbeta;
    // Cubic through the last three rows with the prescribed slope at the
    // boundary, evaluated one spacing outside.
    for (int k = 0; k < g.na; ++k) {
        const double fb = p(b, k), f1 = p(b - 1, k), f2 = p(b - 2, k);
        const double two_ch2 = 0.5 * (8.0 * f1 - f2 - 7.0 * fb + 6.0 * slope[k] * h);
        p(b + 1, k) = 2.0 * fb + two_ch2 - f1;
    }
    return p;
}

CovectorField gradient(const PaddedField& f, const Grid& g) {
    CovectorField out{std::vector<double>(g.size()), std::vector<double>(g.size(), 0.0)};
    const double h = g.dbeta;
#pragma omp parallel for if (detail::go_parallel(g.size()))
    for (int j = 0; j < g.nb; ++j) {
        for (int k = 0; k < g.na; ++k) {
            const std::size_t i = g.index(j, k);
            out.b[i] = (f(j + 1, k) - f(j - 1, k)) / (2.0 * h);
            // Periodic alpha direction: fourth order is as cheap as second.
            if (g.full2d()) out.a[i] = dalpha4(f, g, j, k) / g.sin_beta[j];
        }
    }
    return out;
}

CovectorField gradient(const ScalarField& f, const Grid& g) { return gradient(pad_extrapolated(f, g), g); }

SymTensorField hessian(const PaddedField& f, const Grid& g) {
    SymTensorField out{std::vector<double>(g.size()), std::vector<double>(g.size(), 0.0),
                       std::vector<double>(g.size())};
    const double h = g.dbeta;
    const double da = g.dalpha;
    const int shift = g.na / 2;
    // Row -2 is the pole reflection of row 1.
    auto at = [&](int j, int k) { return j >= -1 ? f.wrap(j, k) : f.wrap(-j - 1, k + shift); };
    // Signed sin(beta) of padded rows: negative across the pole.
    auto sin_row = [&](int j) { return std::sin((j + 0.5) * h); };
    auto d2alpha4 = [&](int j, int k) {
        return (-f.wrap(j, k - 2) + 16.0 * f.wrap(j, k - 1) - 30.0 * f(j, k) + 16.0 * f.wrap(j, k + 1) -
                f.wrap(j, k + 2)) /
               (12.0 * da * da);
    };
#pragma omp parallel for if (detail::go_parallel(g.size()))
    for (int j = 0; j < g.nb; ++j) {
        const double s = g.sin_beta[j];
        const double cot = g.cos_beta[j] / s;
        for (int k = 0; k < g.na; ++k) {
            const std::size_t i = g.index(j, k);
            out.bb[i] = (f(j + 1, k) - 2.0 * f(j, k) + f(j - 1, k)) / (h * h);
            if (g.full2d()) {
                // Near the pole the Christoffel terms carry a 1/sin(beta)
                // factor, so the alpha differences and the beta derivative
                // multiplying cot(beta) are taken to fourth order, and the
                // mixed entry is the beta-derivative of f_alpha / sin(beta),
                // which is smooth across the pole.
                const double sp = j + 1 == g.nb ? std::sin(g.beta[j] + h) : sin_row(j + 1);
                const double sm = sin_row(j - 1);
                out.ba[i] = (dalpha4(f, g, j + 1, k) / sp - dalpha4(f, g, j - 1, k) / sm) / (2.0 * h);
                double fb;
                if (j + 2 <= g.nb)
                    fb = (-at(j + 2, k) + 8.0 * at(j + 1, k) - 8.0 * at(j - 1, k) + at(j - 2, k)) / (12.0 * h);
                else
                    fb = (f(j + 1, k) - f(j - 1, k)) / (2.0 * h);
                out.aa[i] = d2alpha4(j, k) / (s * s) + cot * fb;
            } else {
                const double fb = (f(j + 1, k) - f(j - 1, k)) / (2.0 * h);
                out.aa[i] = cot * fb;
            }
        }
    }
    return out;
}

SymTensorField hessian(const ScalarField& f, const Grid& g) { return hessian(pad_extrapolated(f, g), g); }

double integrate(const ScalarField& f, const Grid& g) {
    if (f.size() != g.size()) throw GridError("field size does not match grid");
    std::vector<double> rows(g.nb);
#pragma omp parallel for if (detail::go_parallel(g.size()))
    for (int j = 0; j < g.nb; ++j) {
        double s = 0.0;
        for (int k = 0; k < g.na; ++k) s += f[g.index(j, k)];
        rows[j] = s * g.wbeta[j];
    }
    double total = 0.0;
    for (double r : rows) total += r;
    return total * g.azimuth_measure;
}

std::vector<double> boundary_ring(const ScalarField& f, const Grid& g) {
    const int b = g.boundary_row();
    return {f.begin() + static_cast<std::ptrdiff_t>(g.index(b, 0)),
            f.begin() + static_cast<std::ptrdiff_t>(g.index(b, 0) + g.na)};
}

double boundary_integrate(const std::vector<double>& ring, const Grid& g) {
    if (static_cast<int>(ring.size()) != g.na) throw GridError("boundary ring size does not match grid");
    if (!g.full2d()) return ring[0] * unit_sphere_area(g.n - 1);
    double s = 0.0;
    for (double x : ring) s += x;
    return s * g.dalpha;
}

}  // namespace capflow
