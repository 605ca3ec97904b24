#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace arct::crowd {

struct WorkerResponse {
    std::string item_id;
    std::string worker_id;
    double submission_time = 0.0; // seconds since epoch, UTC
    std::string label;
};

// Item-response competence model. Generative story, per item i with true
// label T_i drawn uniformly: each response by worker j first draws a spam
// flag S ~ Bernoulli(1 - theta_j); a non-spamming worker copies T_i, a
// spamming one draws from its spam distribution xi_j.
struct WorkerModel {
    std::vector<std::string> labels; // sorted label set
    std::map<std::string, double> competences;
    std::map<std::string, std::vector<double>> spam_dists;
    std::map<std::string, std::vector<double>> posteriors;
    // Marginal log-likelihood of the data at the fitted parameters.
    double log_likelihood = 0.0;
    // Per-iteration EM objective of the winning restart: marginal
    // log-likelihood plus the Dirichlet/Beta smoothing terms. Equals the
    // plain log-likelihood when smoothing_delta is 0; non-decreasing by
    // construction of EM.
    std::vector<double> objective_history;

    int label_index(const std::string& label) const;
    std::string posterior_argmax(const std::string& item_id) const;
};

struct AggregationConfig {
    int em_iterations = 50;
    int restarts = 10;
    double smoothing_delta = 0.1;
    std::uint64_t seed = 0;
    // Explicit label set; empty means "the distinct labels observed".
    std::vector<std::string> label_set;
};

struct MajorityEntry {
    std::string label;
    bool tie = false;
};

struct MajorityResult {
    std::map<std::string, MajorityEntry> by_item;
    // Items from `expected_items` that had no responses.
    std::vector<std::string> excluded_items;
};

// Modal label per item; ties broken toward the lexicographically smallest
// label with the tie flag set.
MajorityResult majority_vote(const std::vector<WorkerResponse>& responses,
                             const std::vector<std::string>& expected_items = {});

// EM fit of the competence model. Deterministic for a given seed: restarts
// draw from sub-seeds, the best final objective wins, and all reductions run
// in a canonical item/worker order.
WorkerModel mace_fit(const std::vector<WorkerResponse>& responses,
                     const AggregationConfig& config);

// Keeps the ceil(keep_fraction * n) items with the highest posterior
// confidence (max posterior probability; ties by item id ascending) and
// emits the argmax label for each.
std::map<std::string, std::string> threshold_predictions(const WorkerModel& model,
                                                         double keep_fraction);

// Response JSONL: {"itemId": str, "workerId": str,
//                  "submissionTime": ISO-8601 UTC, "label": str}
std::vector<WorkerResponse> load_responses(const std::string& path);

void save_responses(const std::vector<WorkerResponse>& responses, const std::string& path);

// Output TSV: itemId  label  confidence (confidence = max posterior).
void save_predictions_tsv(const WorkerModel& model,
                          const std::map<std::string, std::string>& predictions,
                          const std::string& path);

std::map<std::string, std::pair<std::string, double>> load_predictions_tsv(
    const std::string& path);

} // namespace arct::crowd
