#include <benchmark/benchmark.h>

#include "lindyn/luh.hpp"

using namespace lindyn;
using namespace lindyn::luh;

static LuhTask small_task() {
    LuhTask t;
    t.domain = holo::PlanarDomain::right_half_plane();
    t.phi = maps::SelfMap::translation(1.0);
    t.targets = {holo::ComplexPoly({1.0}), holo::ComplexPoly({0.0, 1.0})};
    t.compacts = {holo::CompactSet::disk(2.0, 0.5)};
    t.orders = {-1, 0, 1};
    t.tolerances = {0.1};
    return t;
}

// One plan-and-fit stage from the initial state.
static void BM_FirstStage(benchmark::State& state) {
    const auto task = small_task();
    const auto init = initial_state(task, make_disk_chain(task.domain, 4));
    const auto req = enumerate_requirements(task).front();
    for (auto _ : state) {
        const auto plan = plan_stage(init, task, req);
        auto next = build_stage(with_plan(init, plan), plan, task);
        benchmark::DoNotOptimize(next.h_partial.degree());
    }
}
BENCHMARK(BM_FirstStage)->Unit(benchmark::kMillisecond);

static void BM_FullRun(benchmark::State& state) {
    const auto task = small_task();
    const auto chain = make_disk_chain(task.domain, 8);
    for (auto _ : state) {
        auto run = run_luh(task, chain, 100);
        benchmark::DoNotOptimize(run.h.degree());
    }
}
BENCHMARK(BM_FullRun)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
