// Structured (beta, alpha) discretization of the closed upper half-sphere.
//
// beta is the polar angle measured from the +E_{n+1} pole, alpha the azimuth.
// Nodes are cell-centred at the pole (beta_0 = h/2) and the last row sits
// exactly on the equator beta = pi/2, which is the support hyperplane.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace capflow {

enum class Mode { Full2D, Axisym };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct GridError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Grid {
    Mode mode = Mode::Axisym;
    int n = 2;            // dimension of the hypersurface
    int nb = 0;           // rows in beta
    int na = 1;           // columns in alpha (1 in Axisym mode)
    double dbeta = 0.0;
    double dalpha = 0.0;  // 2 pi / na in Full2D, 0 in Axisym
    double beta0 = 0.0;

    std::vector<double> beta, sin_beta, cos_beta;
    std::vector<double> alpha, sin_alpha, cos_alpha;

    // Row weights of the measure sin^{n-1}(beta) dbeta (no azimuthal factor).
    std::vector<double> wbeta;
    // Flux-divergence closure factors (1 in the interior, 9/8 and 3/8 on the
    // last two rows); the control volume of row j is wbeta[j] / closure[j].
    std::vector<double> closure;
    // beta-faces between rows j and j+1 (j = 0..nb-2): sin(beta) and the
    // area factor sin^{n-1}(beta) at the face.
    std::vector<double> face_sin, face_area;
    // Azimuthal measure attached to every node: dalpha (Full2D) or |S^{n-1}|.
    double azimuth_measure = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(nb) * na; }
    std::size_t index(int j, int k) const {
        return static_cast<std::size_t>(j) * na + k;
    }
    int boundary_row() const { return nb - 1; }
    double weight(int j) const { return wbeta[j] * azimuth_measure; }
    bool full2d() const { return mode == Mode::Full2D; }
};

Grid build_grid(Mode mode, int n, int n_beta, int n_alpha = 1);

// Per-node field stored row-major: index(j, k) = j * na + k.
using ScalarField = std::vector<double>;

// Covector in the orthonormal frame (d_beta, d_alpha / sin beta).
struct CovectorField {
    std::vector<double> b, a;
};

// Symmetric 2-tensor in the same orthonormal frame.  In Axisym mode the
// aa entry is the (n-1)-fold tangential diagonal entry.
struct SymTensorField {
    std::vector<double> bb, ba, aa;
};

// Field with one extra row on each side: row -1 is the pole mirror row,
// row nb is the ghost ring outside beta = pi/2.
class PaddedField {
public:
    PaddedField() = default;
    PaddedField(const Grid& g) : nb_(g.nb), na_(g.na), data_((g.nb + 2) * g.na, 0.0) {}

    double& operator()(int j, int k) { return data_[static_cast<std::size_t>(j + 1) * na_ + k]; }
    double operator()(int j, int k) const { return data_[static_cast<std::size_t>(j + 1) * na_ + k]; }
    // Periodic access in alpha.
    double wrap(int j, int k) const {
        k %= na_;
        if (k < 0) k += na_;
        return (*this)(j, k);
    }
    int nb() const { return nb_; }
    int na() const { return na_; }

private:
    int nb_ = 0, na_ = 1;
    std::vector<double> data_;
};

// Copy the interior values and apply the pole reflection rule.  The ghost
// ring is left to the caller.
PaddedField pad_interior(const ScalarField& f, const Grid& g);

// Padding for generic smooth fields: the ghost ring is filled by cubic
// extrapolation, so centred stencils at the boundary row behave like
// second-order one-sided stencils.
PaddedField pad_extrapolated(const ScalarField& f, const Grid& g);

// Padding for phi = log(rho) under the capillary condition
// d_beta phi = cos(theta) * sqrt(1 + |grad phi|^2) at beta = pi/2.
PaddedField fill_ghost(const ScalarField& phi, double theta, const Grid& g);

// Boundary slope p(alpha) = cot(theta) * sqrt(1 + |grad_tan phi|^2).
std::vector<double> capillary_slope(const ScalarField& phi, double theta, const Grid& g);

// Fourth-order periodic derivative in alpha of a padded row.
double dalpha4(const PaddedField& f, const Grid& g, int j, int k);

CovectorField gradient(const PaddedField& f, const Grid& g);
CovectorField gradient(const ScalarField& f, const Grid& g);
SymTensorField hessian(const PaddedField& f, const Grid& g);
SymTensorField hessian(const ScalarField& f, const Grid& g);

double integrate(const ScalarField& f, const Grid& g);
// Boundary ring values (size na); trapezoidal/periodic in alpha, |S^{n-1}|
// factor in Axisym mode.
double boundary_integrate(const std::vector<double>& ring, const Grid& g);
std::vector<double> boundary_ring(const ScalarField& f, const Grid& g);

// Surface measures used by the tests and the reference constants.
double unit_sphere_area(int dim);  // |S^dim|
double unit_ball_volume(int dim);  // |B^dim|

}  // namespace capflow
