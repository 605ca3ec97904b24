#include <benchmark/benchmark.h>

#include "arct/crowd.hpp"
#include "bench_common.hpp"

using namespace arct;

static void BM_MaceFit(benchmark::State& state) {
    const auto responses = bench::simulated_responses(static_cast<int>(state.range(0)), 9, 0.8, 1);
    crowd::AggregationConfig cfg;
    cfg.seed = 2;
    cfg.restarts = 2;
    cfg.em_iterations = 25;
    for (auto _ : state) {
        auto model = crowd::mace_fit(responses, cfg);
        benchmark::DoNotOptimize(model.log_likelihood);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MaceFit)->Arg(50)->Arg(200)->Arg(800);

static void BM_MajorityVote(benchmark::State& state) {
    const auto responses = bench::simulated_responses(static_cast<int>(state.range(0)), 9, 0.8, 1);
    for (auto _ : state) {
        auto result = crowd::majority_vote(responses);
        benchmark::DoNotOptimize(result.by_item.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MajorityVote)->Arg(200)->Arg(2000);
