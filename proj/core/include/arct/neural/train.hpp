#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arct/corpus.hpp"
#include "arct/neural/model.hpp"

namespace arct::neural {

struct TrainConfig {
    double dropout_rate = 0.9;
    int patience_epochs = 5; // epochs without dev improvement before stopping
    int max_epochs = 50;
    int runs = 3;
    std::uint64_t seed = 0;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int embed_dim = 32;
    int hidden_dim = 64;
    int batch_size = 16;
    bool train_embeddings = true;
    std::string pretrained_embeddings; // optional path
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double dev_accuracy = 0.0;
};

struct TrainResult {
    NeuralParams params; // parameters of the best dev epoch
    std::vector<EpochStats> history;
    double best_dev_accuracy = 0.0;
    int best_epoch = 0;
    bool diverged = false; // loss went non-finite; history holds the run so far
};

// The training-data augmentation: each instance also appears with the
// warrant slots swapped and the label flipped.
std::vector<corpus::TaskInstance> double_with_permutations(
    const std::vector<corpus::TaskInstance>& instances);

// One training run: the training set is doubled with the permuted instance
// (W1, W0, flipped label), mini-batch ADAM with inverted dropout, dev
// accuracy checked each epoch, early stop on patience.
TrainResult train(const corpus::DataSplit& split, const TrainConfig& config, Variant variant);

std::vector<int> predict(NeuralParams& params, const std::vector<corpus::TaskInstance>& instances);

// Max relative error (with a small absolute floor) between reverse-mode
// gradients and central finite differences, sampling at least
// min_coords_per_tensor coordinates per tensor.
double grad_check(NeuralParams& params, const corpus::TaskInstance& instance, double epsilon,
                  int min_coords_per_tensor = 50, std::uint64_t seed = 0);

// epoch,train_loss,dev_acc
void save_history_csv(const std::vector<EpochStats>& history, const std::string& path);

// Versioned binary params file with a JSON manifest (dims, variant, seed).
void save_params(const NeuralParams& params, const std::string& path);
NeuralParams load_params(const std::string& path);

} // namespace arct::neural
