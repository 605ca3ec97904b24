#include "arct/neural/model.hpp"
#include "arct/neural/train.hpp"

#include <cmath>

#include "arct/error.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace arct;
using corpus::TaskInstance;
using neural::NeuralParams;
using neural::Tape;
using neural::TrainConfig;
using neural::Var;
using neural::Variant;

namespace {

TaskInstance make_instance(const std::string& id, const std::string& w0, const std::string& w1,
                           int label) {
    TaskInstance inst;
    inst.instance_id = id;
    inst.warrant0 = w0;
    inst.warrant1 = w1;
    inst.label = label;
    inst.reason = "shared reason tokens for " + id;
    inst.claim = "shared claim tokens";
    inst.debate_title = "debate title";
    inst.debate_info = "debate info words";
    return inst;
}

std::vector<TaskInstance> overfit_fixture() {
    std::vector<TaskInstance> out;
    const char* nouns[] = {"cats", "dogs", "birds", "fish", "goats",
                           "mice", "bees", "ants", "cows", "owls"};
    for (int i = 0; i < 10; ++i) {
        const int label = i % 2;
        const std::string good = std::string(nouns[i]) + " help people";
        const std::string bad = std::string(nouns[i]) + " harm people";
        out.push_back(make_instance("inst" + std::to_string(i), label == 0 ? good : bad,
                                    label == 0 ? bad : good, label));
    }
    return out;
}

NeuralParams small_params(Variant variant, std::uint64_t seed = 7, int e = 8, int d = 4) {
    return neural::init_params(overfit_fixture(), variant, e, d, seed);
}

} // namespace

TEST_CASE("tape: gradients of a linear function are exact") {
    // loss = w . x + b ; d loss / d w = x, d loss / d b = 1.
    neural::Tensor w("w", neural::Mat::Zero(5, 1));
    neural::Tensor b("b", neural::Mat::Zero(1, 1));
    Rng rng(3);
    neural::Mat x(5, 1);
    for (int i = 0; i < 5; ++i) {
        w.value(i) = rng.normal();
        x(i) = rng.normal();
    }
    b.value(0, 0) = 0.25;

    Tape tape;
    const Var loss = tape.add(tape.dot(tape.leaf(w), tape.leaf(x)), tape.leaf(b));
    tape.backward(loss);

    const double eps = 1e-4;
    for (int i = 0; i < 5; ++i) {
        const double orig = w.value(i);
        auto eval = [&](double v) {
            w.value(i) = v;
            Tape t2;
            return t2.value(t2.add(t2.dot(t2.leaf(w), t2.leaf(x)), t2.leaf(b)))(0, 0);
        };
        const double fd = (eval(orig + eps) - eval(orig - eps)) / (2 * eps);
        w.value(i) = orig;
        CHECK(std::abs(w.grad(i) - fd) / std::max({std::abs(fd), std::abs(w.grad(i)), 1.0}) <
              1e-8);
        CHECK(w.grad(i) == doctest::Approx(x(i)).epsilon(1e-10));
    }
    CHECK(b.grad(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("encode_attention_source: output is 2d for any input length") {
    for (const bool with_context : {false, true}) {
        auto params = small_params({true, with_context});
        const auto inst = make_instance("x", "alpha beta", "gamma delta epsilon", 0);
        const auto v0 = neural::encode_attention_source(params, inst, 0);
        const auto v1 = neural::encode_attention_source(params, inst, 1);
        CHECK(v0.size() == 2 * params.hidden_dim);
        CHECK(v1.size() == 2 * params.hidden_dim);
    }
}

TEST_CASE("standard variant: both slots share one attention vector") {
    auto params = small_params({false, false});
    const auto inst = make_instance("x", "alpha beta", "gamma delta", 1);
    const auto v0 = neural::encode_attention_source(params, inst, 0);
    const auto v1 = neural::encode_attention_source(params, inst, 1);
    CHECK((v0 - v1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("intra-warrant variant: slot vectors differ when the other warrant differs") {
    auto params = small_params({true, false});
    const auto inst = make_instance("x", "cats help people", "cats harm people", 0);
    const auto v0 = neural::encode_attention_source(params, inst, 0);
    const auto v1 = neural::encode_attention_source(params, inst, 1);
    CHECK((v0 - v1).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("forward: zero-initialized classifier outputs exactly 0.5") {
    auto params = small_params({true, true});
    const auto inst = make_instance("x", "alpha beta", "gamma delta", 0);
    CHECK(neural::forward_prob(params, inst) == 0.5);
}

TEST_CASE("forward: output stays in (0,1) and attention weights sum to 1") {
    Rng rng(13);
    auto params = small_params({true, false});
    // Perturb the classifier so the logit is nonzero.
    for (Eigen::Index i = 0; i < params.cls_w.value.size(); ++i)
        params.cls_w.value(i) = rng.normal();
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = make_instance(
            "t" + std::to_string(trial), "cats help people " + std::to_string(rng.below(50)),
            "dogs harm people " + std::to_string(rng.below(50)), trial % 2);
        const double p = neural::forward_prob(params, inst);
        CHECK(p > 0.0);
        CHECK(p < 1.0);
        for (int slot : {0, 1}) {
            const auto weights = neural::attention_weights(params, inst, slot);
            CHECK(weights.sum() == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(weights.minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("forward: empty token sequences are an error") {
    auto params = small_params({true, false});
    const auto inst = make_instance("x", "...", "gamma delta", 0); // warrant0 tokenizes empty
    CHECK_THROWS_AS(neural::forward_prob(params, inst), Error);
}

TEST_CASE("warrant encoder is slot-invariant given the same attention vector") {
    // Same text in both slots under the standard variant (shared attention
    // vector): the shared encoder must pool both slots identically.
    auto params = small_params({false, false});
    auto inst = make_instance("x", "same warrant text", "same warrant text", 0);
    const auto p0 = neural::pooled_warrant(params, inst, 0);
    const auto p1 = neural::pooled_warrant(params, inst, 1);
    CHECK((p0 - p1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grad_check: full intra-warrant model at double precision") {
    for (const bool with_context : {false, true}) {
        auto params = small_params({true, with_context}, 11);
        Rng rng(5);
        for (Eigen::Index i = 0; i < params.cls_w.value.size(); ++i)
            params.cls_w.value(i) = 0.1 * rng.normal();
        const auto inst = make_instance("g", "cats help people", "cats harm people", 1);
        const double err = neural::grad_check(params, inst, 1e-4, 50, 1);
        CHECK(err < 1e-4);
    }
}

TEST_CASE("grad_check: single-token fields give finite gradients") {
    auto params = small_params({true, false});
    TaskInstance inst;
    inst.instance_id = "tiny";
    inst.warrant0 = "yes";
    inst.warrant1 = "no";
    inst.reason = "why";
    inst.claim = "thus";
    inst.label = 0;
    const double err = neural::grad_check(params, inst, 1e-4, 20, 2);
    CHECK(std::isfinite(err));
    CHECK(err < 1e-4);
}

TEST_CASE("double_with_permutations: doubles the data with flipped labels") {
    const auto base = overfit_fixture();
    const auto doubled = neural::double_with_permutations(base);
    REQUIRE(doubled.size() == 2 * base.size());
    for (size_t i = 0; i < base.size(); ++i) {
        const auto& orig = doubled[2 * i];
        const auto& swapped = doubled[2 * i + 1];
        CHECK(orig.label == base[i].label);
        CHECK(swapped.label == 1 - base[i].label);
        CHECK(swapped.warrant0 == base[i].warrant1);
        CHECK(swapped.warrant1 == base[i].warrant0);
    }
}

TEST_CASE("train: overfits ten instances with dropout off") {
    corpus::DataSplit split;
    split.train = overfit_fixture();
    split.dev = split.train;

    TrainConfig cfg;
    cfg.dropout_rate = 0.0;
    cfg.max_epochs = 200;
    cfg.patience_epochs = 200; // disabled: this run measures capacity
    cfg.seed = 1;
    cfg.learning_rate = 0.02;
    cfg.batch_size = 4;
    cfg.embed_dim = 16;
    cfg.hidden_dim = 16;

    const auto result = neural::train(split, cfg, {true, false});
    CHECK_FALSE(result.diverged);
    CHECK(result.best_dev_accuracy == 1.0);
    CHECK(result.best_epoch <= 200);

    // Loss decreases over the first five epochs.
    REQUIRE(result.history.size() >= 5);
    CHECK(result.history[4].train_loss < result.history[0].train_loss);

    //

    // Prediction at 1.0 accuracy on the training set.
    auto params = result.params;
    const auto labels = neural::predict(params, split.train);
    int correct = 0;
    for (size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == split.train[i].label) ++correct;
    CHECK(correct == 10);
}

TEST_CASE("predict: deterministic and 0.5 maps to label 1") {
    auto params = small_params({true, false});
    const std::vector<TaskInstance> instances = {
        make_instance("a", "alpha beta", "gamma delta", 0)};
    // Zero classifier: forward is exactly 0.5, the boundary goes to 1.
    CHECK(neural::predict(params, instances) == std::vector<int>{1});

    Rng rng(9);
    for (Eigen::Index i = 0; i < params.cls_w.value.size(); ++i)
        params.cls_w.value(i) = rng.normal();
    const double p1 = neural::forward_prob(params, instances[0]);
    const double p2 = neural::forward_prob(params, instances[0]);
    CHECK(p1 == p2);
}

TEST_CASE("train: non-finite loss aborts with the diverged flag") {
    corpus::DataSplit split;
    split.train = overfit_fixture();
    split.dev = split.train;
    TrainConfig cfg;
    cfg.dropout_rate = 0.0;
    cfg.max_epochs = 3;
    cfg.seed = 2;
    cfg.learning_rate = std::numeric_limits<double>::quiet_NaN();
    cfg.batch_size = 4;
    cfg.embed_dim = 8;
    cfg.hidden_dim = 4;
    const auto result = neural::train(split, cfg, {true, false});
    CHECK(result.diverged);
}

TEST_CASE("params save/load round trip") {
    testsupport::TempDir dir;
    auto params = small_params({true, true}, 21);
    Rng rng(4);
    for (Eigen::Index i = 0; i < params.cls_w.value.size(); ++i)
        params.cls_w.value(i) = rng.normal();
    neural::save_params(params, dir.file("params.bin"));
    auto loaded = neural::load_params(dir.file("params.bin"));

    CHECK(loaded.embed_dim == params.embed_dim);
    CHECK(loaded.variant.intra_warrant == params.variant.intra_warrant);
    CHECK(loaded.variant.with_context == params.variant.with_context);
    CHECK(loaded.vocab == params.vocab);

    const auto inst = make_instance("x", "cats help people", "cats harm people", 0);
    CHECK(neural::forward_prob(loaded, inst) == neural::forward_prob(params, inst));
}

TEST_CASE("training history csv") {
    testsupport::TempDir dir;
    neural::save_history_csv({{1, 0.7, 0.5}, {2, 0.6, 0.6}}, dir.file("log.csv"));
    const auto content = testsupport::read_file(dir.file("log.csv"));
    CHECK(content.rfind("epoch,train_loss,dev_acc\n", 0) == 0);
    CHECK(std::count(content.begin(), content.end(), '\n') == 3);
}
