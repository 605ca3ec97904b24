#include <benchmark/benchmark.h>

#include "arct/agreement.hpp"
#include "bench_common.hpp"

using namespace arct;

static void BM_AlphaNominal(benchmark::State& state) {
    const auto responses = bench::simulated_responses(static_cast<int>(state.range(0)), 6, 0.7, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agreement::krippendorff_alpha_nominal(responses));
    }
}
BENCHMARK(BM_AlphaNominal)->Arg(100)->Arg(1000);

static void BM_AlphaUnitized(benchmark::State& state) {
    Rng rng(5);
    std::vector<agreement::Continuum> continua;
    for (int doc = 0; doc < static_cast<int>(state.range(0)); ++doc) {
        agreement::Continuum c;
        c.doc_id = "d" + std::to_string(doc);
        c.length = 400;
        for (const char* ann : {"a", "b", "c"}) {
            std::vector<agreement::Span> spans;
            std::int64_t cursor = 0;
            while (cursor < c.length - 10) {
                const std::int64_t s = cursor + 1 + static_cast<std::int64_t>(rng.below(8));
                const std::int64_t e = s + 1 + static_cast<std::int64_t>(rng.below(9));
                if (e > c.length) break;
                spans.push_back({s, e});
                cursor = e + 1;
            }
            c.unitizations[ann] = spans;
        }
        continua.push_back(std::move(c));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(agreement::krippendorff_alpha_unitized(continua));
    }
}
BENCHMARK(BM_AlphaUnitized)->Arg(1)->Arg(8);
