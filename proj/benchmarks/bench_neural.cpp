#include <benchmark/benchmark.h>

#include "arct/neural/train.hpp"

using namespace arct;

namespace {

std::vector<corpus::TaskInstance> fixture() {
    std::vector<corpus::TaskInstance> out;
    const char* nouns[] = {"cats", "dogs", "birds", "fish", "goats"};
    for (int i = 0; i < 16; ++i) {
        corpus::TaskInstance inst;
        inst.instance_id = "i" + std::to_string(i);
        inst.label = i % 2;
        const std::string noun = nouns[i % 5];
        inst.warrant0 = noun + " help people in many towns";
        inst.warrant1 = noun + " harm people in many towns";
        inst.reason = "a reason about " + noun + " and their habits";
        inst.claim = "a claim about " + noun;
        inst.debate_title = "a debate title";
        inst.debate_info = "a longer debate description with words";
        out.push_back(inst);
    }
    return out;
}

} // namespace

static void BM_ForwardBackward(benchmark::State& state) {
    auto instances = fixture();
    auto params = neural::init_params(instances, {true, true},
                                      static_cast<int>(state.range(0)),
                                      static_cast<int>(state.range(1)), 3);
    const auto& inst = instances[0];
    for (auto _ : state) {
        params.zero_grads();
        neural::Tape tape;
        const auto logit = neural::build_logit(tape, params, inst, {});
        const auto loss = tape.logistic_loss(logit, 1.0);
        tape.backward(loss);
        benchmark::DoNotOptimize(tape.value(loss)(0, 0));
    }
}
BENCHMARK(BM_ForwardBackward)->Args({32, 64})->Args({16, 16});

static void BM_Predict(benchmark::State& state) {
    auto instances = fixture();
    auto params = neural::init_params(instances, {true, false}, 32, 64, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(neural::predict(params, instances).size());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(instances.size()));
}
BENCHMARK(BM_Predict);
