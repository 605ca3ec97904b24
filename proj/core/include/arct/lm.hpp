#pragma once

#include <istream>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "arct/corpus.hpp"

namespace arct::lm {

// Interpolated Modified Kneser-Ney n-gram model with an eagerly built
// prob/backoff table, so a freshly trained model and one loaded from disk
// evaluate identically. The vocabulary is the unk token plus the
// max_vocab - 1 most frequent corpus tokens; <s> and </s> are structural.
class LanguageModel {
public:
    struct Discounts {
        double d1 = 0.0, d2 = 0.0, d3plus = 0.0;
        bool single = false; // count-of-counts fallback: one discount for all classes
    };

    int order() const { return order_; }
    const std::vector<std::string>& vocab() const { return vocab_; }
    const std::vector<Discounts>& discounts() const { return discounts_; }
    const std::vector<std::string>& notes() const { return notes_; }

    int unk_id() const { return unk_id_; }
    int bos_id() const { return bos_id_; }
    int eos_id() const { return eos_id_; }

    // Unknown tokens map to unk.
    int token_id(const std::string& token) const;

    // Every scoreable token id: the vocabulary without <s>.
    std::vector<int> predictable_ids() const;

    // ln p(word | context), backing off through shorter contexts. Context
    // may be any length; only the last order-1 ids are used.
    double cond_log_prob(std::span<const int> context, int word) const;

    // Sequence score: sum of ln p over the tokens, left-padded with order-1
    // sentence-start symbols. OOV tokens score as unk. Errors on empty input.
    double log_prob(const std::vector<std::string>& tokens) const;

    void save(const std::string& path) const;
    static LanguageModel load(const std::string& path);

    // Raw training count of an n-gram (tokens map through the vocabulary,
    // so OOV queries count as unk). Populated by training only; a model
    // loaded from disk reports 0.
    long raw_count(const std::vector<std::string>& ngram) const;

private:
    friend LanguageModel train_kn(std::istream&, int, int);

    int order_ = 0;
    int unk_id_ = 0, bos_id_ = 0, eos_id_ = 0;
    std::vector<std::string> vocab_;
    std::unordered_map<std::string, int> token_ids_;
    std::vector<Discounts> discounts_;
    std::vector<std::string> notes_;
    // logprob_[n-1]: packed n-gram -> ln p(w | first n-1 ids)
    std::vector<std::unordered_map<std::string, double>> logprob_;
    // logbo_[len]: packed context of that length -> ln backoff weight
    std::vector<std::unordered_map<std::string, double>> logbo_;
    // raw_[n-1]: packed n-gram -> training count (not serialized)
    std::vector<std::unordered_map<std::string, long>> raw_;
};

// Trains on plain text, one sentence per line, tokenized by
// arct::text::tokenize. Discounts per order come from count-of-counts
// (Y = n1/(n1+2 n2), D1 = 1-2Y n2/n1, D2 = 2-3Y n3/n2, D3+ = 3-4Y n4/n3);
// degenerate count-of-counts fall back to the single discount Y, recorded
// in notes().
LanguageModel train_kn(std::istream& corpus, int order, int max_vocab);

LanguageModel train_kn_file(const std::string& path, int order, int max_vocab);

// The warrant-choice rule: score both warrants (optionally with the reason
// and claim prepended) and predict the slot with the LOWER log-likelihood;
// ties go to slot 0.
int lm_choose(const LanguageModel& model, const corpus::TaskInstance& instance,
              bool with_context = false);

} // namespace arct::lm
