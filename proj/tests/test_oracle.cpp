#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "capflow/functionals.hpp"
#include "capflow/oracle.hpp"

using namespace capflow;
using std::numbers::pi;

TEST_SUITE("oracle") {

TEST_CASE("cap_rho: hemisphere, boundary circle and axis height") {
    for (double b : {0.0, 0.3, 1.0, pi / 2}) CHECK(cap_rho({pi / 2, 1.7}, b) == doctest::Approx(1.7).epsilon(1e-15));
    CHECK(cap_rho({pi / 3, 1.0}, pi / 2) == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-15));
    CHECK(cap_rho({pi / 3, 1.0}, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("cap_rho: samples lie on the sphere |x - r cos(theta) e| = r") {
    for (double theta : {0.2, pi / 6, pi / 3, pi / 2, 2 * pi / 3, 5 * pi / 6, 2.9}) {
        for (double r : {0.5, 1.0, 2.0}) {
            for (int i = 0; i <= 200; ++i) {
                const double beta = (pi / 2) * i / 200.0;
                const double rho = cap_rho({theta, r}, beta);
                // e = -E_3, so the centre is (0, 0, -r cos(theta)).
                const double dx = rho * std::sin(beta), dz = rho * std::cos(beta) + r * std::cos(theta);
                CHECK(std::abs(std::hypot(dx, dz) - r) < 1e-14 * std::max(1.0, r));
            }
        }
    }
}

TEST_CASE("cap_jet: derivatives agree with finite differences of cap_rho") {
    const CapSpec cap{2 * pi / 3, 1.3};
    const double h = 1e-4;
    for (double b : {0.1, 0.7, 1.2}) {
        const CapJet j = cap_jet(cap, b);
        CHECK(j.rho == doctest::Approx(cap_rho(cap, b)).epsilon(1e-15));
        CHECK(j.drho == doctest::Approx((cap_rho(cap, b + h) - cap_rho(cap, b - h)) / (2 * h)).epsilon(1e-7));
        CHECK(j.d2rho ==
              doctest::Approx((cap_rho(cap, b + h) - 2 * cap_rho(cap, b) + cap_rho(cap, b - h)) / (h * h)).epsilon(1e-5));
        CHECK(j.phi == doctest::Approx(std::log(j.rho)).epsilon(1e-15));
        CHECK(j.dphi == doctest::Approx(j.drho / j.rho).epsilon(1e-14));
    }
}

TEST_CASE("cap_graph: exact samples and the capillary slope at the equator") {
    const Grid g = build_grid(Mode::Axisym, 2, 64);
    const RadialGraph rg = cap_graph({pi / 3, 1.0}, g);
    CHECK(rg.theta == pi / 3);
    for (int j = 0; j < g.nb; ++j) CHECK(rg.phi[j] == doctest::Approx(std::log(cap_rho({pi / 3, 1.0}, g.beta[j]))).epsilon(1e-15));
    // Capillary condition d_beta phi = cot(theta) at beta = pi/2 (no tangential gradient).
    CHECK(cap_jet({pi / 3, 1.0}, pi / 2).dphi == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("cap_functionals: hemisphere and 60 degree caps") {
    const CapFunctionals h = cap_functionals({pi / 2, 1.0}, 2);
    for (double v : h.V) CHECK(v == doctest::Approx(2 * pi / 3).epsilon(1e-14));
    const CapFunctionals c = cap_functionals({pi / 3, 1.0}, 2);
    for (double v : c.V) CHECK(v == doctest::Approx(5 * pi / 24).epsilon(1e-14));
    const CapFunctionals c2 = cap_functionals({pi / 3, 2.0}, 2);
    CHECK(c2.V[0] == doctest::Approx(5 * pi / 3).epsilon(1e-14));
    CHECK(c2.V[1] == doctest::Approx(5 * pi / 6).epsilon(1e-14));
    CHECK(c2.V[2] == doctest::Approx(5 * pi / 12).epsilon(1e-14));
    CHECK(c2.area == doctest::Approx(2 * pi * 4 * 0.5).epsilon(1e-14));
    CHECK(c2.wetted_area == doctest::Approx(pi * 4 * 0.75).epsilon(1e-14));
}

TEST_CASE("cap_functionals: quadrature for n = 3 matches the half ball") {
    const CapFunctionals c = cap_functionals({pi / 2, 1.0}, 3);
    CHECK(c.b_theta == doctest::Approx(pi * pi / 4).epsilon(1e-10));
    CHECK(c.area == doctest::Approx(pi * pi).epsilon(1e-10));
    CHECK(c.wetted_area == doctest::Approx(4 * pi / 3).epsilon(1e-10));
}

TEST_CASE("cap_functionals: homogeneity in r") {
    for (int n : {2, 3}) {
        for (double theta : {pi / 6, 2 * pi / 3}) {
            const CapFunctionals a = cap_functionals({theta, 1.0}, n), b = cap_functionals({theta, 2.0}, n);
            for (int k = 0; k <= n + 1; ++k)
                CHECK(b.V[k] == doctest::Approx(std::pow(2.0, n + 1 - k) * a.V[k]).epsilon(1e-13));
        }
    }
}

TEST_CASE("cap_functionals agree with grid quadrature in both modes") {
    for (Mode m : {Mode::Axisym, Mode::Full2D}) {
        for (int n : {2, 3}) {
            if (m == Mode::Full2D && n != 2) continue;
            const double theta = 2 * pi / 3, r = 1.4;
            const CapFunctionals ref = cap_functionals({theta, r}, n);
            std::vector<double> errors;
            const std::vector<int> levels = m == Mode::Full2D ? std::vector<int>{32, 64, 128} : std::vector<int>{128, 256, 512};
            for (int nb : levels) {
                const Grid g = build_grid(m, n, nb, nb);
                const RadialGraph rg = cap_graph({theta, r}, g);
                const GeometryField geo = compute_geometry(rg);
                double e = 0.0;
                const int kmax = m == Mode::Full2D ? n : n + 1;  // V_3 is not part of the Full2D contract
                for (int k = 0; k <= kmax; ++k) e = std::max(e, std::abs(quermassintegral(rg, geo, k) - ref.V[k]) / ref.V[k]);
                errors.push_back(e);
            }
            CAPTURE(to_string(m));
            CAPTURE(n);
            CHECK(errors.back() < 1e-3);
            CHECK(convergence_order(errors) >= 1.8);
        }
    }
}

TEST_CASE("convergence_order: exact quartering, constant errors and the infinity flag") {
    CHECK(convergence_order({1e-2, 2.5e-3, 6.25e-4}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(convergence_order({3e-3, 3e-3, 3e-3}) == doctest::Approx(0.0).scale(1).epsilon(1e-12));
    CHECK(std::isinf(convergence_order({1e-2, 0.0, 1e-4})));
    CHECK(std::isinf(convergence_order({1e-2, -1e-3, 1e-4})));
    CHECK(convergence_order({8.0, 1.0, 0.125}, {1.0, 0.5, 0.25}) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("ellipsoid oracle: unit sphere limit and the orthogonal contact") {
    for (double b : {0.0, 0.5, pi / 2}) CHECK(ellipsoid_rho(0.0, b) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(ellipsoid_mean_curvature(0.0, 2, 0.6, 0.8) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ellipsoid_mean_curvature(0.0, 3, 0.6, 0.8) == doctest::Approx(3.0).epsilon(1e-14));
    // At the equator the radial graph is horizontal-normal: d_beta rho = 0.
    const double h = 1e-5;
    CHECK(std::abs(ellipsoid_rho(0.3, pi / 2 + h) - ellipsoid_rho(0.3, pi / 2 - h)) < 1e-12);
    // Pole of x_perp^2 + 1.3 z^2 = 1 (semi-axes a = 1, c = 1/sqrt(1.3)):
    // both principal curvatures equal c / a^2.
    const double a = 1.0, c = 1.0 / std::sqrt(1.3);
    CHECK(ellipsoid_mean_curvature(0.3, 2, 0.0, c) == doctest::Approx(2 * c / (a * a)).epsilon(1e-12));
}

}  // TEST_SUITE
