#include "cflat/dressing.hpp"
#include "cflat/immersion.hpp"
#include "cflat/uk_system.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace cflat;

namespace {

ExtendedFrame dressed_frame()
{
    const CartanBasis basis = CartanBasis::semisimple(3);
    std::mt19937_64 rng(1);
    return ExtendedFrame::vacuum(basis).dressed(random_simple_element(0.5, basis.form(), rng));
}

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void BM_DressedSolution(benchmark::State& state)
{
    const ExtendedFrame frame = dressed_frame();
    const GridGeometry g = GridGeometry::cube(3, -1.0, 1.0, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(dressed_solution(frame, g, exec_of(state)));
    }
}

void BM_UkResidual(benchmark::State& state)
{
    const ExtendedFrame frame = dressed_frame();
    const GridGeometry g = GridGeometry::cube(3, -1.0, 1.0, static_cast<int>(state.range(0)));
    const SolutionGrid sol = dressed_solution(frame, g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(uk_residual(sol, exec_of(state)));
    }
}

void BM_BuildImmersion(benchmark::State& state)
{
    const ExtendedFrame frame = dressed_frame();
    const GridGeometry g = GridGeometry::cube(3, -1.0, 1.0, static_cast<int>(state.range(0)));
    const RVec c = default_null_vector(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_immersion(frame, g, c, exec_of(state)));
    }
}

void BM_Flatness(benchmark::State& state)
{
    const ExtendedFrame frame = dressed_frame();
    const GridGeometry g = GridGeometry::cube(3, -1.0, 1.0, static_cast<int>(state.range(0)));
    const LaxEvaluator theta = [&](const RVec& x, Complex l) { return frame.lax(x, l); };
    for (auto _ : state) {
        benchmark::DoNotOptimize(flatness_residual(theta, g, 0.5, exec_of(state)));
    }
}

} // namespace

BENCHMARK(BM_DressedSolution)->ArgNames({"steps", "parallel"})->ArgsProduct({{11, 21}, {0, 1}});
BENCHMARK(BM_UkResidual)->ArgNames({"steps", "parallel"})->ArgsProduct({{11, 21}, {0, 1}});
BENCHMARK(BM_BuildImmersion)->ArgNames({"steps", "parallel"})->ArgsProduct({{11, 21}, {0, 1}});
BENCHMARK(BM_Flatness)->ArgNames({"steps", "parallel"})->ArgsProduct({{11}, {0, 1}});

BENCHMARK_MAIN();
