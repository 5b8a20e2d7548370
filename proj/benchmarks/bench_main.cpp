#include <benchmark/benchmark.h>

#include "hillspec/harness.hpp"
#include "hillspec/kernel.hpp"
#include "hillspec/ode.hpp"
#include "hillspec/potential.hpp"
#include "hillspec/spectra.hpp"

using namespace hillspec;

namespace {

Potential cos_potential() {
    return Potential(PotentialSpec::fourier({0.0, 0.0}, {{1.0, 0.0}}, {}));
}

Potential quartic_potential() {
    Q2Spec q2;
    q2.poly_coeffs = {{16.0, 0.0}, {-4.0, 0.0}};
    return Potential(construct_from_q2(q2, ExtensionMode::HalfPeriod).spec);
}

SearchRegion box(double re_min, double re_max, double im_min, double im_max) {
    SearchRegion r;
    r.re_min = re_min;
    r.re_max = re_max;
    r.im_min = im_min;
    r.im_max = im_max;
    return r;
}

void bm_monodromy_zero(benchmark::State& state) {
    Potential q(PotentialSpec::zero());
    Complex mu{37.0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(monodromy(q, mu));
}
BENCHMARK(bm_monodromy_zero)->Unit(benchmark::kMicrosecond);

void bm_monodromy_fourier(benchmark::State& state) {
    Potential q = cos_potential();
    Complex mu{37.0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(monodromy(q, mu));
}
BENCHMARK(bm_monodromy_fourier)->Unit(benchmark::kMicrosecond);

void bm_monodromy_quartic(benchmark::State& state) {
    Potential q = quartic_potential();
    Complex mu{37.0, 1.0};
    for (auto _ : state) benchmark::DoNotOptimize(monodromy(q, mu));
}
BENCHMARK(bm_monodromy_quartic)->Unit(benchmark::kMicrosecond);

void bm_discriminant_with_derivative(benchmark::State& state) {
    Potential q = cos_potential();
    Complex mu{100.0, 2.0};
    for (auto _ : state) benchmark::DoNotOptimize(discriminant(q, mu, {}, true));
}
BENCHMARK(bm_discriminant_with_derivative)->Unit(benchmark::kMicrosecond);

void bm_count_zeros_segment(benchmark::State& state) {
    Potential q = cos_potential();
    SearchRegion region = box(0.5, 150.0, -5.0, 5.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(count_zeros(q, ProblemTag::D, region));
}
BENCHMARK(bm_count_zeros_segment)->Unit(benchmark::kMillisecond);

void bm_find_eigenvalues_band(benchmark::State& state) {
    Potential q = cos_potential();
    SearchRegion region = box(-1.0, 60.0, -6.0, 6.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(find_eigenvalues(q, ProblemTag::P, region));
}
BENCHMARK(bm_find_eigenvalues_band)->Unit(benchmark::kMillisecond)->Iterations(3);

void bm_goursat(benchmark::State& state) {
    Potential q = cos_potential();
    int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(solve_goursat(q, n));
    state.SetComplexityN(n);
}
BENCHMARK(bm_goursat)->Arg(32)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oNSquared);

void bm_identity_grid_sweep(benchmark::State& state) {
    Potential q = cos_potential();
    auto grid = default_identity_grid();
    for (auto _ : state)
        benchmark::DoNotOptimize(identity_residual_sym(q, grid));
}
BENCHMARK(bm_identity_grid_sweep)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
