#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "arct/corpus.hpp"
#include "arct/neural/autodiff.hpp"
#include "arct/random.hpp"

namespace arct::neural {

struct Variant {
    // Standard attention builds one attention vector from [R ; C] for both
    // slots; intra-warrant attention builds a per-slot vector from
    // [R ; C ; W_other]. with_context prepends [title ; description].
    bool intra_warrant = true;
    bool with_context = false;

    std::string name() const;
};

// All weights of the classifier: an attention-source BiLSTM, a warrant
// BiLSTM shared by both slots, additive attention (two projections plus a
// score vector) and a logistic classifier over the concatenated pooled
// warrants.
struct NeuralParams {
    int embed_dim = 32;  // E
    int hidden_dim = 64; // d per direction
    Variant variant;
    std::uint64_t seed = 0;
    std::vector<std::string> vocab; // index 0 is <unk>
    std::unordered_map<std::string, int> token_ids;
    bool train_embeddings = true;

    Tensor embedding; // V x E
    Tensor att_wf, att_uf, att_bf, att_wb, att_ub, att_bb; // attention-source BiLSTM
    Tensor war_wf, war_uf, war_bf, war_wb, war_ub, war_bb; // warrant BiLSTM (shared)
    Tensor att_proj_h, att_proj_a, att_score;              // additive attention
    Tensor cls_w, cls_b; // zero-initialized: an untrained model outputs 0.5

    std::vector<Tensor*> tensors();
    std::vector<const Tensor*> tensors() const;
    int token_id(const std::string& token) const;
    void zero_grads();
};

// Random initialization; the vocabulary is every token occurring in the
// given instances (all text fields) plus <unk>.
NeuralParams init_params(const std::vector<corpus::TaskInstance>& instances, Variant variant,
                         int embed_dim, int hidden_dim, std::uint64_t seed);

// Overrides embedding rows for vocabulary tokens found in a plain-text
// "token v1 ... vE" file; dimensions must match embed_dim.
void load_pretrained_embeddings(NeuralParams& params, const std::string& path);

struct ForwardOptions {
    double dropout_rate = 0.0; // inverted dropout on embeddings and pooled vectors
    Rng* dropout_rng = nullptr; // nullptr disables dropout
};

// Builds the forward graph for one instance on the tape and returns the
// classifier logit (1x1). P(warrant1 correct) = sigmoid(logit).
Var build_logit(Tape& tape, NeuralParams& params, const corpus::TaskInstance& instance,
                const ForwardOptions& opts);

// Dropout-free probability that warrant1 is the correct one.
double forward_prob(NeuralParams& params, const corpus::TaskInstance& instance);

// The (2d) max-pooled BiLSTM encoding that attention for the given slot
// conditions on.
Eigen::VectorXd encode_attention_source(NeuralParams& params,
                                        const corpus::TaskInstance& instance, int slot);

// Per-timestep attention weights over the given slot's warrant (sums to 1).
Eigen::VectorXd attention_weights(NeuralParams& params, const corpus::TaskInstance& instance,
                                  int slot);

// The attention-pooled (2d) encoding of the given slot's warrant.
Eigen::VectorXd pooled_warrant(NeuralParams& params, const corpus::TaskInstance& instance,
                               int slot);

} // namespace arct::neural
