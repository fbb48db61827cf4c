// Wall-clock comparison of the serial reference kernels against the OpenMP
// kernels on the same inputs.  Usage: bench_kernels [n_beta] [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include <omp.h>

#include "capflow/flow.hpp"
#include "capflow/reference.hpp"

using namespace capflow;

namespace {

template <class F>
double seconds_per_call(F&& f, int repeats) {
    f();  // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i) f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / repeats;
}

double max_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

void bench(const char* label, const RadialGraph& rg, int repeats) {
    volatile double sink = 0.0;
    const double t_ref = seconds_per_call([&] { sink = sink + reference::scalar_rhs(rg)[0]; }, repeats);
    const double t_omp = seconds_per_call([&] { sink = sink + scalar_rhs(rg)[0]; }, repeats);
    const double diff = max_diff(reference::scalar_rhs(rg), scalar_rhs(rg));
    std::printf("%-28s nodes=%8zu  serial %10.3f ms  openmp %10.3f ms  speedup %5.2fx  max|diff| %.1e\n", label,
                rg.grid.size(), 1e3 * t_ref, 1e3 * t_omp, t_ref / t_omp, diff);

    const double q_ref = seconds_per_call([&] { sink = sink + reference::integrate(rg.phi, rg.grid); }, repeats);
    const double q_omp = seconds_per_call([&] { sink = sink + integrate(rg.phi, rg.grid); }, repeats);
    std::printf("%-28s quadrature: serial %8.3f us  openmp %8.3f us\n", "", 1e6 * q_ref, 1e6 * q_omp);

    const double g_omp = seconds_per_call([&] { sink = sink + compute_geometry(rg).H[0]; }, repeats);
    std::printf("%-28s geometry (openmp) %8.3f ms\n", "", 1e3 * g_omp);
}

}  // namespace

int main(int argc, char** argv) {
    const int nb = argc > 1 ? std::atoi(argv[1]) : 256;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 20;
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
    const double theta = std::numbers::pi / 3.0;

    const Grid ax = build_grid(Mode::Axisym, 2, nb);
    bench("axisym n=2", RadialGraph{ax, perturbed_cap(ax, {theta, 1.0}, named_perturbation(1, 0.1)), theta},
          repeats * 50);

    const Grid full = build_grid(Mode::Full2D, 2, nb, nb);
    bench("full2d", RadialGraph{full, perturbed_cap(full, {theta, 1.0}, named_perturbation(5, 0.1)), theta},
          repeats);
    return 0;
}
