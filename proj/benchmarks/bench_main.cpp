#include <benchmark/benchmark.h>

#include "kerr/direct1d.hpp"
#include "kerr/inversion.hpp"
#include "kerr/media.hpp"
#include "kerr/stationary.hpp"

namespace {

using namespace kerr;

void BM_Retardation(benchmark::State& state) {
    const auto chi = SusceptibilityField::analytic(
        {{1.0, {0, 0, 0}, 0.4}, {0.7, {0.5, -0.3, 0.1}, 0.3}}, 2.0, 6.0);
    const Ray ray({-5, 0.2, 0.1}, Direction::e1(), 0.0, 10.0);
    for (auto _ : state) {
        RetardationProfile tau = retardation(chi, 1.0, ray);
        benchmark::DoNotOptimize(tau.tau_infinity());
    }
}
BENCHMARK(BM_Retardation);

void BM_PoissonDirichlet(benchmark::State& state) {
    const std::size_t n = std::size_t(state.range(0));
    const Grid3D grid = Grid3D::cube(2.0, n);
    PoissonDirichlet solver(grid);
    ScalarField g(grid.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = double(i % 17) - 8.0;
    for (auto _ : state) {
        ScalarField v = solver.solve(g);
        benchmark::DoNotOptimize(v.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PoissonDirichlet)->Arg(32)->Arg(48)->Arg(64)->Complexity();

void BM_Wave1DStep(benchmark::State& state) {
    const double h = 0.01, dx = h / 10.0;
    const std::size_t n = std::size_t(20.0 / dx) + 1;
    Grid1D grid(0.0, dx, n);
    std::vector<double> chi(n, 0.0), e2(n, 0.0), e3(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid.node(j);
        if (x > 8 && x < 12) chi[j] = h;
        e2[j] = 2 * h * std::cos(x / h) * std::exp(-(x - 3) * (x - 3));
    }
    Wave1DSolver solver(grid, chi, e2, e3, dx);
    for (auto _ : state) {
        solver.step();
        benchmark::DoNotOptimize(solver.e2().data());
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(n));
}
BENCHMARK(BM_Wave1DStep);

void BM_FbpSlice(benchmark::State& state) {
    const std::size_t na = 180, no = 256;
    Sinogram sino(1, na, no);
    sino.offset_min = -2.0;
    sino.offset_max = 2.0;
    sino.e0 = 1.0;
    for (std::size_t a = 0; a < na; ++a)
        for (std::size_t o = 0; o < no; ++o) {
            const double p = sino.offset_min + 4.0 * double(o) / double(no - 1);
            sino.at(0, a, o) = std::exp(-p * p);
        }
    for (auto _ : state) {
        SusceptibilityField rec = fbp_reconstruct(sino, 128);
        benchmark::DoNotOptimize(rec.samples().data());
    }
}
BENCHMARK(BM_FbpSlice);

} // namespace

BENCHMARK_MAIN();
