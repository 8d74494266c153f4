#include <benchmark/benchmark.h>

#include "lindyn/holo.hpp"

using namespace lindyn;
using namespace lindyn::holo;

static void BM_FrechetHalfPlane(benchmark::State& state) {
    const auto dom = PlanarDomain::right_half_plane();
    const auto f = as_evaluable(ComplexPoly({1.0, 0.5, 0.25, 0.125}));
    const auto g = as_evaluable(ComplexPoly({0.0, 0.5}));
    const int N = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(frechet_distance(f, g, dom, N).value);
}
BENCHMARK(BM_FrechetHalfPlane)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_PolyEval(benchmark::State& state) {
    std::vector<cplx> c(static_cast<std::size_t>(state.range(0)) + 1, cplx{0.5, 0.25});
    const ComplexPoly p(c);
    cplx z{0.3, 0.1};
    for (auto _ : state) benchmark::DoNotOptimize(p(z));
}
BENCHMARK(BM_PolyEval)->Arg(10)->Arg(300);

BENCHMARK_MAIN();
