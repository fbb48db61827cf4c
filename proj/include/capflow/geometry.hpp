// Pointwise geometry of the radial graph Sigma = { exp(phi(X)) X }.
//
// Conventions: the normal points outward (away from the origin), so the unit
// sphere has kappa = +1; e = -E_{n+1}; H is the unnormalized mean curvature
// (sum of principal curvatures) and H_k = sigma_k(kappa) / C(n, k).
#pragma once

#include <array>
#include <vector>

#include "capflow/grid.hpp"

namespace capflow {

struct RadialGraph {
    Grid grid;
    ScalarField phi;
    double theta = 0.0;
};

using Vec3 = std::array<double, 3>;

// Weingarten map h^i_j in the orthonormal (beta, alpha) frame.  In Axisym
// mode the map is diagonal: bb is the meridian curvature and aa the
// (n-1)-fold parallel curvature.
struct Weingarten {
    double bb = 0.0, ba = 0.0, ab = 0.0, aa = 0.0;
};

struct GeometryField {
    int n = 2;
    Mode mode = Mode::Axisym;
    // Gradient of phi in the orthonormal frame.
    std::vector<double> phi_b, phi_a;
    std::vector<double> v, rho, u, ubar, nu_e, H, Hbar, f;
    // Positions and normals.  In Axisym mode these live in the meridian
    // half-plane alpha = 0: (rho sin beta, 0, rho cos beta).
    std::vector<Vec3> x, nu;
    std::vector<Weingarten> W;
    std::vector<double> kappa;  // n values per node, ascending in Full2D
    std::vector<double> Hk;     // n + 1 values per node, Hk[0] = 1
    std::vector<char> convex;   // all kappa > 0

    double kappa_at(std::size_t node, int i) const { return kappa[node * n + i]; }
    double Hk_at(std::size_t node, int k) const { return Hk[node * (n + 1) + k]; }
    // Dense n x n Weingarten matrix (row-major) at a node.
    std::vector<double> weingarten_matrix(std::size_t node) const;
};

// Positions, normals and support functions only.
GeometryField embed(const RadialGraph& rg);
// Full pointwise state: embedding, Weingarten map, curvatures and speed.
GeometryField compute_geometry(const RadialGraph& rg);
GeometryField compute_geometry(const RadialGraph& rg, const PaddedField& padded);

// f = n (1 + cos(theta) <nu, e>) - H <x, nu>.
ScalarField speed(const RadialGraph& rg);

// d phi / dt = F, evaluated in conservative flux form.  The flux form makes
// the quadrature of exp((n+1) phi) F vanish identically, which is the
// discrete statement that the enclosed volume is preserved.
ScalarField scalar_rhs(const RadialGraph& rg);
ScalarField scalar_rhs(const RadialGraph& rg, const PaddedField& padded);
ScalarField scalar_rhs(const Grid& grid, double theta, const PaddedField& padded);

struct BoundaryDiagnostics {
    double dmu_ubar = 0.0;   // max |grad_mu ubar| on the boundary
    double dmu_H = 0.0;      // max |grad_mu H|
    double contact = 0.0;    // max |<nu, e> + cos(theta)|
};

BoundaryDiagnostics boundary_diagnostics(const RadialGraph& rg, const GeometryField& geo);

// Elementary symmetric polynomials sigma_0..sigma_m of the given values.
std::vector<double> elementary_symmetric(const double* values, int m);
double binomial(int n, int k);

}  // namespace capflow
