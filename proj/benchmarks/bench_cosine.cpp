#include <benchmark/benchmark.h>

#include <numeric>

#include "lindyn/cosine.hpp"

using namespace lindyn::cosine;

static std::vector<int> first_n(int n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::iota(v.begin(), v.end(), 1);
    return v;
}

static void BM_CheckConditions(benchmark::State& state) {
    const auto w = example_weight(4.0, 1.0);
    const auto ns = first_n(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto r = check_conditions(w, GridInterval{-5.0, 5.0}, PartitionScheme::whole(), ns, NormSpec::lp(1.0), 1e-6);
        benchmark::DoNotOptimize(r.pass);
    }
}
BENCHMARK(BM_CheckConditions)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_SupercyclicityDemo(benchmark::State& state) {
    const auto w = example_weight(4.0, 1.0);
    const auto chi = GridFunction::indicator(0.0, 1.0);
    const auto ns = first_n(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto r = supercyclicity_demo(chi, chi, w, PartitionScheme::whole(), ns, NormSpec::lp(1.0), 1e-3);
        benchmark::DoNotOptimize(r.hit);
    }
}
BENCHMARK(BM_SupercyclicityDemo)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_OrliczNorm(benchmark::State& state) {
    const auto f = GridFunction::indicator(-static_cast<double>(state.range(0)), 0.0);
    for (auto _ : state) benchmark::DoNotOptimize(norm(f, NormSpec::orlicz_exp()));
}
BENCHMARK(BM_OrliczNorm)->Arg(1)->Arg(64);

BENCHMARK_MAIN();
