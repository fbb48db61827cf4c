// Independent analytic ground truth: exact spherical caps, their closed-form
// functionals, an ellipsoid curvature oracle and refinement-order estimation.
#pragma once

#include <vector>

#include "capflow/geometry.hpp"

namespace capflow {

// The cap C_{theta,r}: the part of the sphere |x - r cos(theta) e| = r,
// e = -E_{n+1}, lying in the upper half-space.
struct CapSpec {
    double theta = 0.0;
    double r = 1.0;
};

struct CapJet {
    double rho = 0.0, drho = 0.0, d2rho = 0.0;
    double phi = 0.0, dphi = 0.0, d2phi = 0.0;
};

double cap_rho(const CapSpec& cap, double beta);
CapJet cap_jet(const CapSpec& cap, double beta);
RadialGraph cap_graph(const CapSpec& cap, const Grid& grid);

struct CapFunctionals {
    int n = 2;
    double b_theta = 0.0;          // unit-cap volume
    double area = 0.0;             // |Sigma|
    double boundary_length = 0.0;  // |dSigma|
    double wetted_area = 0.0;      // area of the wetted disc
    std::vector<double> V;         // V_0 .. V_{n+1}
};

// n = 2 from closed forms; other n from 1-D tanh-sinh quadrature.
CapFunctionals cap_functionals(const CapSpec& cap, int n);

// Least-squares slope of log(error) against log(h) with h_i = 2^{-i}.
// Returns +infinity when an error is zero or negative.
double convergence_order(const std::vector<double>& errors);
// Same fit against explicit step sizes.
double convergence_order(const std::vector<double>& errors, const std::vector<double>& steps);

// Spheroid x_perp^2 + (1 + eps) z^2 = 1 as a radial graph over the
// half-sphere; it meets the plane z = 0 orthogonally (theta = pi/2).
double ellipsoid_rho(double eps, double beta);
RadialGraph ellipsoid_graph(double eps, const Grid& grid);
// Unnormalized mean curvature (outward normal) of the n-dimensional spheroid
// at the point with horizontal radius x_perp and height z.
double ellipsoid_mean_curvature(double eps, int n, double x_perp, double z);

}  // namespace capflow
