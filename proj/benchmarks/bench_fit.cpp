#include <benchmark/benchmark.h>

#include "lindyn/luh.hpp"

using namespace lindyn;

// Two-disk Mergelyan fit of 0 on one disk and 1 on another, by sample density.
static void BM_MergelyanFit(benchmark::State& state) {
    const int samples = static_cast<int>(state.range(0));
    const auto A = holo::CompactSet::disk(0.0, 0.5, samples), B = holo::CompactSet::disk(3.0, 0.5, samples);
    const Evaluable zero = [](cplx) { return cplx{}; };
    const Evaluable one = [](cplx) { return cplx{1.0}; };
    for (auto _ : state) {
        auto r = luh::mergelyan_fit(A, zero, B, one, 1e-3, 60);
        benchmark::DoNotOptimize(r.degree);
    }
}
BENCHMARK(BM_MergelyanFit)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
