#include "arct/lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "arct/error.hpp"
#include "arct/text.hpp"

namespace arct::lm {

namespace {

constexpr const char* kUnk = "<unk>";
constexpr const char* kBos = "<s>";
constexpr const char* kEos = "</s>";
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string pack(std::span<const int> ids) {
    std::string key(ids.size() * sizeof(int), '\0');
    std::memcpy(key.data(), ids.data(), key.size());
    return key;
}

std::vector<int> unpack(const std::string& key) {
    std::vector<int> ids(key.size() / sizeof(int));
    std::memcpy(ids.data(), key.data(), key.size());
    return ids;
}

double discount_for(const LanguageModel::Discounts& d, long count) {
    if (d.single) return d.d1; // one discount for every count class
    if (count == 1) return d.d1;
    if (count == 2) return d.d2;
    return d.d3plus;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

int LanguageModel::token_id(const std::string& token) const {
    const auto it = token_ids_.find(token);
    return it == token_ids_.end() ? unk_id_ : it->second;
}

std::vector<int> LanguageModel::predictable_ids() const {
    std::vector<int> out;
    for (int id = 0; id < static_cast<int>(vocab_.size()); ++id)
        if (id != bos_id_) out.push_back(id);
    return out;
}

double LanguageModel::cond_log_prob(std::span<const int> context, int word) const {
    const size_t max_ctx = static_cast<size_t>(order_ - 1);
    std::span<const int> ctx = context.size() > max_ctx
                                   ? context.subspan(context.size() - max_ctx)
                                   : context;
    double bo_acc = 0.0;
    for (size_t len = ctx.size();; --len) {
        std::vector<int> gram(ctx.end() - static_cast<std::ptrdiff_t>(len), ctx.end());
        gram.push_back(word);
        const auto& table = logprob_[len];
        const auto it = table.find(pack(gram));
        if (it != table.end() && it->second != kNegInf) return bo_acc + it->second;
        if (len == 0)
            throw Error("cannot score token id " + std::to_string(word) +
                        " (not a predictable token)");
        const auto& bos_table = logbo_[len];
        const auto bit =
            bos_table.find(pack(std::span<const int>(ctx.end() - static_cast<std::ptrdiff_t>(len),
                                                     ctx.end())));
        if (bit != bos_table.end()) bo_acc += bit->second;
    }
}

long LanguageModel::raw_count(const std::vector<std::string>& ngram) const {
    if (ngram.empty() || ngram.size() > static_cast<size_t>(order_) || raw_.empty()) return 0;
    std::vector<int> ids;
    for (const auto& t : ngram) ids.push_back(token_id(t));
    const auto& table = raw_[ids.size() - 1];
    const auto it = table.find(pack(ids));
    return it == table.end() ? 0 : it->second;
}

double LanguageModel::log_prob(const std::vector<std::string>& tokens) const {
    if (tokens.empty()) throw Error("log_prob: empty token sequence");
    std::vector<int> ids(static_cast<size_t>(order_ - 1), bos_id_);
    for (const auto& t : tokens) ids.push_back(token_id(t));
    double total = 0.0;
    for (size_t pos = static_cast<size_t>(order_ - 1); pos < ids.size(); ++pos)
        total += cond_log_prob(std::span<const int>(ids.data(), pos), ids[pos]);
    return total;
}

LanguageModel train_kn(std::istream& corpus, int order, int max_vocab) {
    if (order < 2) throw Error("train_kn: order must be >= 2");
    if (max_vocab < 1) throw Error("train_kn: max_vocab must be >= 1");

    // Pass 1: sentences and frequencies.
    std::vector<std::vector<std::string>> sentences;
    std::map<std::string, long> freq;
    std::string line;
    size_t total_tokens = 0;
    while (std::getline(corpus, line)) {
        auto toks = text::tokenize(line);
        if (toks.empty()) continue;
        total_tokens += toks.size();
        for (const auto& t : toks) freq[t] += 1;
        sentences.push_back(std::move(toks));
    }
    if (total_tokens < static_cast<size_t>(order))
        throw Error("train_kn: corpus yields fewer tokens than the model order");

    LanguageModel model;
    model.order_ = order;
    // Vocabulary: unk plus the max_vocab - 1 most frequent tokens, ties by
    // lexicographic order.
    std::vector<std::pair<long, std::string>> ranked;
    ranked.reserve(freq.size());
    for (const auto& [tok, n] : freq) ranked.emplace_back(n, tok);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    const size_t keep = std::min(ranked.size(), static_cast<size_t>(max_vocab - 1));

    auto add_token = [&](const std::string& tok) {
        const int id = static_cast<int>(model.vocab_.size());
        model.vocab_.push_back(tok);
        model.token_ids_[tok] = id;
        return id;
    };
    model.unk_id_ = add_token(kUnk);
    model.bos_id_ = add_token(kBos);
    model.eos_id_ = add_token(kEos);
    for (size_t i = 0; i < keep; ++i) add_token(ranked[i].second);

    // Pass 2: raw n-gram counts over padded sentences; every window ends at
    // a predicted position (a real token or </s>), so nothing ends at <s>.
    std::vector<std::unordered_map<std::string, long>> raw(static_cast<size_t>(order));
    for (const auto& sent : sentences) {
        std::vector<int> padded(static_cast<size_t>(order - 1), model.bos_id_);
        for (const auto& t : sent) padded.push_back(model.token_id(t));
        padded.push_back(model.eos_id_);
        for (size_t pos = static_cast<size_t>(order - 1); pos < padded.size(); ++pos)
            for (int n = 1; n <= order; ++n)
                raw[static_cast<size_t>(n - 1)]
                   [pack(std::span<const int>(&padded[pos + 1 - static_cast<size_t>(n)],
                                              static_cast<size_t>(n)))] += 1;
    }

    // Adjusted counts: raw at the top order; continuation type counts below,
    // except for n-grams starting with <s>, which keep their raw counts
    // (nothing can precede the sentence start).
    std::vector<std::unordered_map<std::string, long>> adj(static_cast<size_t>(order));
    adj[static_cast<size_t>(order - 1)] = raw[static_cast<size_t>(order - 1)];
    for (int n = order - 1; n >= 1; --n) {
        auto& target = adj[static_cast<size_t>(n - 1)];
        for (const auto& [key, count] : raw[static_cast<size_t>(n)]) {
            const auto ids = unpack(key);
            target[pack(std::span<const int>(ids.data() + 1, ids.size() - 1))] += 1;
        }
        for (const auto& [key, count] : raw[static_cast<size_t>(n - 1)]) {
            const auto ids = unpack(key);
            if (ids.front() == model.bos_id_) target[key] = count;
        }
    }

    // Discounts per order from count-of-counts over the adjusted counts.
    model.discounts_.resize(static_cast<size_t>(order));
    for (int n = 1; n <= order; ++n) {
        long n1 = 0, n2 = 0, n3 = 0, n4 = 0;
        for (const auto& [key, count] : adj[static_cast<size_t>(n - 1)]) {
            if (count == 1) ++n1;
            else if (count == 2) ++n2;
            else if (count == 3) ++n3;
            else if (count == 4) ++n4;
        }
        auto& d = model.discounts_[static_cast<size_t>(n - 1)];
        const double y = (n1 + 2 * n2) > 0
                             ? static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2)
                             : 0.0;
        if (n1 > 0 && n2 > 0 && n3 > 0 && n4 > 0) {
            d.d1 = 1.0 - 2.0 * y * static_cast<double>(n2) / static_cast<double>(n1);
            d.d2 = 2.0 - 3.0 * y * static_cast<double>(n3) / static_cast<double>(n2);
            d.d3plus = 3.0 - 4.0 * y * static_cast<double>(n4) / static_cast<double>(n3);
            if (d.d2 < 0.0 || d.d3plus < 0.0) {
                d = {y, y, y, true};
                model.notes_.push_back("order " + std::to_string(n) +
                                       ": negative discount, single-discount fallback D = " +
                                       fmt(y));
            }
        } else {
            double single = y;
            if (single <= 0.0) single = 0.5; // keep smoothing mass available
            d = {single, single, single, true};
            model.notes_.push_back("order " + std::to_string(n) +
                                   ": missing count-of-counts, single-discount fallback D = " +
                                   fmt(single));
        }
    }

    model.logprob_.resize(static_cast<size_t>(order));
    model.logbo_.resize(static_cast<size_t>(order)); // index = context length

    // Unigrams, interpolated with the uniform distribution over the
    // predictable vocabulary so every predictable token has positive mass.
    {
        const auto& d = model.discounts_[0];
        const auto& counts = adj[0];
        std::vector<std::pair<std::string, long>> sorted_counts(counts.begin(), counts.end());
        std::sort(sorted_counts.begin(), sorted_counts.end());
        double total = 0.0, reserved = 0.0;
        for (const auto& [key, count] : sorted_counts) {
            total += static_cast<double>(count);
            reserved += discount_for(d, count);
        }
        const auto predictable = model.predictable_ids();
        const double v = static_cast<double>(predictable.size());
        const double lambda = reserved / total;
        for (int id : predictable) {
            const int one[1] = {id};
            const auto it = counts.find(pack(one));
            const double c = it == counts.end() ? 0.0 : static_cast<double>(it->second);
            const double disc = it == counts.end() ? 0.0 : discount_for(d, it->second);
            const double p = std::max(c - disc, 0.0) / total + lambda / v;
            model.logprob_[0][pack(one)] = std::log(p);
        }
    }

    // Higher orders, bottom-up; stored probabilities are fully interpolated.
    for (int n = 2; n <= order; ++n) {
        const auto& d = model.discounts_[static_cast<size_t>(n - 1)];
        // Group by context.
        std::unordered_map<std::string, std::vector<std::pair<int, long>>> by_context;
        for (const auto& [key, count] : adj[static_cast<size_t>(n - 1)]) {
            const auto ids = unpack(key);
            by_context[pack(std::span<const int>(ids.data(), ids.size() - 1))].emplace_back(
                ids.back(), count);
        }
        for (auto& [ctx_key, words] : by_context) {
            std::sort(words.begin(), words.end());
            double total = 0.0, reserved = 0.0;
            for (const auto& [w, count] : words) {
                total += static_cast<double>(count);
                reserved += discount_for(d, count);
            }
            const double lambda = reserved / total;
            const auto ctx_ids = unpack(ctx_key);
            const std::span<const int> lower_ctx(ctx_ids.data() + 1, ctx_ids.size() - 1);
            for (const auto& [w, count] : words) {
                const double lower = std::exp(model.cond_log_prob(lower_ctx, w));
                const double p =
                    std::max(static_cast<double>(count) - discount_for(d, count), 0.0) / total +
                    lambda * lower;
                auto full = ctx_ids;
                full.push_back(w);
                model.logprob_[static_cast<size_t>(n - 1)][pack(full)] = std::log(p);
            }
            model.logbo_[ctx_ids.size()][ctx_key] = std::log(lambda);
        }
    }
    model.raw_ = std::move(raw);
    return model;
}

LanguageModel train_kn_file(const std::string& path, int order, int max_vocab) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    return train_kn(in, order, max_vocab);
}

int lm_choose(const LanguageModel& model, const corpus::TaskInstance& instance,
              bool with_context) {
    auto score = [&](const std::string& warrant) {
        std::vector<std::string> toks;
        if (with_context) {
            for (const auto& t : text::tokenize(instance.reason)) toks.push_back(t);
            for (const auto& t : text::tokenize(instance.claim)) toks.push_back(t);
        }
        for (const auto& t : text::tokenize(warrant)) toks.push_back(t);
        if (toks.empty()) return 0.0; // empty after tokenization: vacuous score
        return model.log_prob(toks);
    };
    const double lp0 = score(instance.warrant0);
    const double lp1 = score(instance.warrant1);
    return lp1 < lp0 ? 1 : 0;
}

void LanguageModel::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "arct-lm\t1\n";
    out << "order\t" << order_ << "\n";
    for (const auto& note : notes_) out << "note\t" << note << "\n";
    for (int n = 1; n <= order_; ++n) {
        const auto& d = discounts_[static_cast<size_t>(n - 1)];
        out << "discounts\t" << n << '\t' << fmt(d.d1) << '\t' << fmt(d.d2) << '\t'
            << fmt(d.d3plus) << '\t' << (d.single ? 1 : 0) << "\n";
    }
    for (int n = 1; n <= order_; ++n) {
        // Collect grams plus backoff-only contexts of this length.
        std::map<std::vector<std::string>, std::pair<double, const double*>> rows;
        for (const auto& [key, lp] : logprob_[static_cast<size_t>(n - 1)]) {
            std::vector<std::string> toks;
            for (int id : unpack(key)) toks.push_back(vocab_[static_cast<size_t>(id)]);
            rows[toks] = {lp, nullptr};
        }
        if (static_cast<size_t>(n) < logbo_.size()) {
            for (const auto& [key, bo] : logbo_[static_cast<size_t>(n)]) {
                std::vector<std::string> toks;
                for (int id : unpack(key)) toks.push_back(vocab_[static_cast<size_t>(id)]);
                auto it = rows.find(toks);
                if (it == rows.end())
                    rows[toks] = {kNegInf, &bo};
                else
                    it->second.second = &bo;
            }
        }
        out << "\\" << n << "-grams\t" << rows.size() << "\n";
        for (const auto& [toks, entry] : rows) {
            out << (entry.first == kNegInf ? std::string("-inf") : fmt(entry.first)) << '\t'
                << text::join(toks, " ");
            if (entry.second != nullptr) out << '\t' << fmt(*entry.second);
            out << "\n";
        }
    }
    out << "end\n";
    if (!out) throw Error("write failed: " + path);
}

LanguageModel LanguageModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line) || text::split(line, '\t') != std::vector<std::string>{"arct-lm", "1"})
        throw Error(path + ": not an arct-lm version 1 file");

    LanguageModel model;
    auto expect_cols = [&](const std::vector<std::string>& cols, size_t n, const char* what) {
        if (cols.size() != n) throw Error(path + ": malformed " + what + " line");
    };

    auto intern = [&](const std::string& tok) {
        const auto it = model.token_ids_.find(tok);
        if (it != model.token_ids_.end()) return it->second;
        const int id = static_cast<int>(model.vocab_.size());
        model.vocab_.push_back(tok);
        model.token_ids_[tok] = id;
        return id;
    };
    // The specials get the same ids the trainer assigns.
    model.unk_id_ = intern(kUnk);
    model.bos_id_ = intern(kBos);
    model.eos_id_ = intern(kEos);

    int current_order = 0;
    while (std::getline(in, line)) {
        if (line == "end") break;
        const auto cols = text::split(line, '\t');
        if (cols.empty()) continue;
        if (cols[0] == "order") {
            expect_cols(cols, 2, "order");
            model.order_ = std::stoi(cols[1]);
            if (model.order_ < 2) throw Error(path + ": bad order");
            model.logprob_.resize(static_cast<size_t>(model.order_));
            model.logbo_.resize(static_cast<size_t>(model.order_));
            model.discounts_.resize(static_cast<size_t>(model.order_));
        } else if (cols[0] == "note") {
            expect_cols(cols, 2, "note");
            model.notes_.push_back(cols[1]);
        } else if (cols[0] == "discounts") {
            expect_cols(cols, 6, "discounts");
            const int n = std::stoi(cols[1]);
            if (n < 1 || n > model.order_) throw Error(path + ": bad discount order");
            auto& d = model.discounts_[static_cast<size_t>(n - 1)];
            d.d1 = std::stod(cols[2]);
            d.d2 = std::stod(cols[3]);
            d.d3plus = std::stod(cols[4]);
            d.single = cols[5] == "1";
        } else if (cols[0].size() > 1 && cols[0][0] == '\\') {
            current_order = std::stoi(cols[0].substr(1));
            if (current_order < 1 || current_order > model.order_)
                throw Error(path + ": bad n-gram section");
        } else {
            if (current_order == 0) throw Error(path + ": n-gram line outside a section");
            if (cols.size() != 2 && cols.size() != 3)
                throw Error(path + ": malformed n-gram line");
            std::vector<int> ids;
            for (const auto& tok : text::split(cols[1], ' ')) ids.push_back(intern(tok));
            if (static_cast<int>(ids.size()) != current_order)
                throw Error(path + ": n-gram arity mismatch");
            const double lp = cols[0] == "-inf" ? kNegInf : std::stod(cols[0]);
            model.logprob_[static_cast<size_t>(current_order - 1)][pack(ids)] = lp;
            if (cols.size() == 3)
                model.logbo_[static_cast<size_t>(current_order)][pack(ids)] = std::stod(cols[2]);
        }
    }
    if (model.order_ == 0) throw Error(path + ": missing order line");
    return model;
}

} // namespace arct::lm
