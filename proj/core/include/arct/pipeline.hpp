#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arct/corpus.hpp"
#include "arct/crowd.hpp"

namespace arct::pipeline {

// A comment's record as it moves through the eight annotation steps. Fields
// fill in stage by stage and stay present from then on (stage-monotone
// schema). `claim` is the debate claim the comment supports once stance is
// known; `opposing_claim` is its stance-flipped counterpart.
struct PipelineRecord {
    std::string record_id;
    std::string debate_id;
    int stage = 0;
    std::optional<std::string> stance_label; // claim | opposing_claim | neutral | none
    std::optional<bool> sarcastic;
    std::optional<std::vector<std::pair<std::int64_t, std::int64_t>>> reason_spans;
    std::optional<std::string> gist;             // R
    std::optional<std::string> claim;            // C
    std::optional<std::string> opposing_claim;   // not-C
    std::optional<std::string> alternative_warrant; // AW
    std::optional<double> logic_score;           // 0..2 crowd rating mean
    std::optional<std::string> warrant;          // W
    std::optional<bool> disputed;
};

struct StepReport {
    int stage = 0;
    int input_count = 0;
    int output_count = 0;
    int dropped_count = 0;
    std::map<std::string, int> drop_reasons;
};

struct StepOutput {
    std::vector<PipelineRecord> records;
    StepReport report;
    // Stage 8 routes records whose validation votes reach no strict
    // majority here for expert adjudication; they are also counted under
    // drop_reasons["disputed"].
    std::vector<PipelineRecord> disputed;
};

struct PipelineConfig {
    crowd::AggregationConfig aggregation;
    double logic_threshold = 0.68; // inclusive, on the raw 0-2 mean scale
    std::uint64_t seed = 0;
};

// Response label conventions per stage; written as labels.json next to the
// stage files and enforced when aggregating.
//   1: claim | opposing_claim | neutral | none, plus sarcastic | not_sarcastic
//   2: spans:<start>-<end>[,<start>-<end>...] (spans: alone marks "none found")
//   3: gist:<text> | wrong_reason
//   4: original_claim | opposing_claim | both
//   5: aw:<text> | impossible
//   6: original_reason | distractor_reason, plus logic ratings 0 | 1 | 2
//   7: w:<text>
//   8: valid | invalid
void write_labels_manifest(const std::string& path);

// Runs one methodology step: consumes records at stage-1 plus that step's
// worker responses (keyed by record id) and emits the surviving records at
// `stage` together with a balanced report.
StepOutput run_step(const std::vector<PipelineRecord>& records, int stage,
                    const std::vector<crowd::WorkerResponse>& responses,
                    const PipelineConfig& config);

// Keeps records with logic_score >= threshold ("at least" semantics, so the
// boundary value stays in). Missing logic_score is an error.
std::pair<std::vector<PipelineRecord>, std::vector<PipelineRecord>> filter_by_logic_score(
    const std::vector<PipelineRecord>& records, double threshold);

using EmbeddingProvider = std::function<std::vector<double>(const std::string&)>;

struct DistractorChoice {
    PipelineRecord record;
    // Candidates (or the target) whose embedding had zero norm and were
    // scored as similarity 0.
    std::vector<std::string> zero_norm_ids;
};

// The reason from the same debate that is most dissimilar to the target's
// gist: argmin cosine similarity of the embedded gists, ties by record id.
DistractorChoice sample_distractor(const PipelineRecord& target,
                                   const std::vector<PipelineRecord>& pool,
                                   const EmbeddingProvider& embed);

// Mean-of-word-vectors provider over a plain-text "token v1 ... vE" file.
// Tokens absent from the file contribute nothing; a gist with no known
// token embeds to the zero vector.
EmbeddingProvider load_word_embeddings(const std::string& path);

struct AssembleResult {
    std::vector<corpus::TaskInstance> instances;
    std::vector<std::string> excluded; // unresolved disputed records
};

// Final packaging: W and AW are placed into warrant0/warrant1 by a seeded
// fair coin per record (records processed in record-id order) and the label
// names the slot holding W.
AssembleResult assemble_instances(const std::vector<PipelineRecord>& records,
                                  const std::map<std::string, corpus::Debate>& debates,
                                  std::uint64_t seed);

// Violations of the stage-monotone schema; empty means well-formed.
std::vector<std::string> validate_record(const PipelineRecord& rec);

// Pipeline state directory: stage-<n>.jsonl + stage-<n>.report.json.
std::vector<PipelineRecord> load_records(const std::string& path);
void save_records(const std::vector<PipelineRecord>& records, const std::string& path);
void save_report(const StepReport& report, const std::string& path);
StepReport load_report(const std::string& path);

} // namespace arct::pipeline
