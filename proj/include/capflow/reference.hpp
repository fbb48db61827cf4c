// Serial reference kernels.  They evaluate the same discretization as the
// OpenMP kernels in a plain single-threaded loop and exist for testing and
// benchmarking only.
#pragma once

#include "capflow/geometry.hpp"

namespace capflow::reference {

// Flux-form right-hand side, one node at a time, no threading.
ScalarField scalar_rhs(const RadialGraph& rg);

// Pointwise (non-conservative) evaluation F = f v / rho from the
// finite-difference curvature; agrees with the flux form to O(h^2).
ScalarField pointwise_rhs(const RadialGraph& rg);

// Row-by-row serial quadrature.
double integrate(const ScalarField& f, const Grid& g);

}  // namespace capflow::reference
