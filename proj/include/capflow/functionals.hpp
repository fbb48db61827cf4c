// Integral quantities of a capillary radial graph: areas, the enclosed
// volume, capillary quermassintegrals, Minkowski residuals, inequality
// ratios, reference constants and cap fitting.
#pragma once

#include <vector>

#include "capflow/geometry.hpp"

namespace capflow {

struct FittedCap {
    double r = 0.0;
    double rms = 0.0;
};

// Variant with the centre free to move along the axis (diagnostic only).
struct FreeCenterCap {
    double center_z = 0.0;
    double radius = 0.0;
    double rms = 0.0;
};

struct FunctionalReport {
    double t = 0.0;
    double dt = 0.0;
    double max_F = 0.0;
    double area = 0.0;
    double boundary_length = 0.0;
    double wetted_area = 0.0;
    double total_mean_curvature = 0.0;  // integral of H dA
    std::vector<double> V;              // V_0 .. V_{n+1}
    std::vector<double> mink_residual;  // k = 1..n stored at k-1
    double static_residual = 0.0;
    double iso_ratio = 0.0;
    std::vector<double> af_ratio;       // k = 1..n stored at k-1
    double minkowski_gap = 0.0;
    double min_u = 0.0;
    double min_kappa = 0.0;
    double max_H = 0.0;
    double bc_residual = 0.0;
    FittedCap fitted_cap;
};

struct ReferenceConstants {
    double theta = 0.0;
    int n = 2;
    double b_theta = 0.0;          // |B^{n+1}_theta|, the volume of the unit cap
    double cap_sphere_area = 0.0;  // |S^n_theta|
    double cap_disc_area = 0.0;    // wetted disc of the unit cap
};

double surface_area(const RadialGraph& rg, const GeometryField& geo);
double enclosed_volume(const RadialGraph& rg);
double wetted_area(const RadialGraph& rg);
double boundary_length(const RadialGraph& rg);
// Integral over the boundary of the (k-1)-th normalized mean curvature of
// the boundary inside the support hyperplane (k = 1..n).
double boundary_curvature_integral(const RadialGraph& rg, int k);
double quermassintegral(const RadialGraph& rg, const GeometryField& geo, int k);
double minkowski_residual(const RadialGraph& rg, const GeometryField& geo, int k);
double static_residual(const RadialGraph& rg, const GeometryField& geo);

ReferenceConstants reference_constants(double theta, int n);

struct InequalityRatios {
    double iso_ratio = 0.0;
    std::vector<double> af_ratio;
    double minkowski_gap = 0.0;
    double minkowski_rhs = 0.0;  // scale of the Minkowski inequality
};

InequalityRatios inequality_ratios(const FunctionalReport& report, const ReferenceConstants& c, int n);

FittedCap fit_cap(const RadialGraph& rg, const GeometryField& geo);
FreeCenterCap fit_cap_free_center(const RadialGraph& rg, const GeometryField& geo);

// Everything above in one pass.
FunctionalReport make_report(const RadialGraph& rg, const GeometryField& geo, double t = 0.0);
FunctionalReport make_report(const RadialGraph& rg, double t = 0.0);

}  // namespace capflow
