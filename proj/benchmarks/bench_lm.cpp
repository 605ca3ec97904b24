#include <benchmark/benchmark.h>

#include <sstream>

#include "arct/lm.hpp"
#include "arct/random.hpp"

using namespace arct;

namespace {

std::string synthetic_corpus(int sentences, std::uint64_t seed) {
    const char* words[] = {"the", "cat", "dog", "sat", "ran", "on", "under", "mat",
                           "log", "tree", "and", "a", "quick", "slow", "bird", "song"};
    Rng rng(seed);
    std::ostringstream out;
    for (int s = 0; s < sentences; ++s) {
        const int len = 5 + static_cast<int>(rng.below(12));
        for (int i = 0; i < len; ++i) {
            if (i > 0) out << ' ';
            out << words[rng.below(16)];
        }
        out << '\n';
    }
    return out.str();
}

} // namespace

static void BM_TrainKneserNey(benchmark::State& state) {
    const auto corpus = synthetic_corpus(static_cast<int>(state.range(0)), 9);
    for (auto _ : state) {
        std::istringstream in(corpus);
        auto model = lm::train_kn(in, 4, 100000);
        benchmark::DoNotOptimize(model.order());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainKneserNey)->Arg(200)->Arg(2000);

static void BM_LogProb(benchmark::State& state) {
    std::istringstream in(synthetic_corpus(2000, 9));
    const auto model = lm::train_kn(in, 4, 100000);
    const std::vector<std::string> tokens = {"the", "quick", "bird", "sat", "under",
                                             "a",   "slow",  "dog", "and", "ran"};
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.log_prob(tokens));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(tokens.size()));
}
BENCHMARK(BM_LogProb);
