#include "arct/neural/model.hpp"

#include <fstream>
#include <set>

#include "arct/error.hpp"
#include "arct/text.hpp"

namespace arct::neural {

namespace {

constexpr const char* kUnk = "<unk>";

Mat glorot(Rng& rng, int rows, int cols) {
    const double r = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-r, r);
    return m;
}

// x -> ids of all tokens across the instance fields the variant needs.
std::vector<int> field_ids(const NeuralParams& params, const std::string& field) {
    std::vector<int> ids;
    for (const auto& tok : text::tokenize(field)) ids.push_back(params.token_id(tok));
    return ids;
}

void append(std::vector<int>& into, const std::vector<int>& ids) {
    into.insert(into.end(), ids.begin(), ids.end());
}

std::vector<int> attention_source_ids(const NeuralParams& params,
                                      const corpus::TaskInstance& inst, int slot) {
    std::vector<int> ids;
    if (params.variant.with_context) {
        append(ids, field_ids(params, inst.debate_title));
        append(ids, field_ids(params, inst.debate_info));
    }
    append(ids, field_ids(params, inst.reason));
    append(ids, field_ids(params, inst.claim));
    if (params.variant.intra_warrant)
        append(ids, field_ids(params, slot == 0 ? inst.warrant1 : inst.warrant0));
    if (ids.empty())
        throw Error("instance '" + inst.instance_id +
                    "': empty attention source after tokenization");
    return ids;
}

struct Lstm {
    Tensor *w, *u, *b;
};

std::vector<Var> lstm_run(Tape& tape, const std::vector<Var>& xs, const Lstm& p, int d,
                          bool reverse) {
    const Var w = tape.leaf(*p.w);
    const Var u = tape.leaf(*p.u);
    const Var b = tape.leaf(*p.b);
    Var h = tape.leaf(Mat::Zero(d, 1));
    Var c = tape.leaf(Mat::Zero(d, 1));
    std::vector<Var> hs(xs.size());
    for (size_t step = 0; step < xs.size(); ++step) {
        const size_t t = reverse ? xs.size() - 1 - step : step;
        const Var gates = tape.add(tape.add(tape.matmul(w, xs[t]), tape.matmul(u, h)), b);
        const Var i = tape.sigmoid_(tape.rows(gates, 0, d));
        const Var f = tape.sigmoid_(tape.rows(gates, d, d));
        const Var o = tape.sigmoid_(tape.rows(gates, 2 * d, d));
        const Var g = tape.tanh_(tape.rows(gates, 3 * d, d));
        c = tape.add(tape.mul(f, c), tape.mul(i, g));
        h = tape.mul(o, tape.tanh_(c));
        hs[t] = h;
    }
    return hs;
}

std::vector<Var> bilstm(Tape& tape, const std::vector<Var>& xs, const Lstm& fwd, const Lstm& bwd,
                        int d) {
    const auto hf = lstm_run(tape, xs, fwd, d, false);
    const auto hb = lstm_run(tape, xs, bwd, d, true);
    std::vector<Var> out(xs.size());
    for (size_t t = 0; t < xs.size(); ++t) out[t] = tape.vstack(hf[t], hb[t]);
    return out;
}

Var maybe_dropout(Tape& tape, Var v, const ForwardOptions& opts) {
    if (opts.dropout_rng == nullptr || opts.dropout_rate <= 0.0) return v;
    const Mat& val = tape.value(v);
    Mat mask(val.rows(), val.cols());
    const double keep = 1.0 - opts.dropout_rate;
    for (Eigen::Index i = 0; i < mask.size(); ++i)
        mask(i) = opts.dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
    return tape.mul(v, tape.leaf(std::move(mask)));
}

std::vector<Var> embed_sequence(Tape& tape, NeuralParams& params, const std::vector<int>& ids,
                                const ForwardOptions& opts) {
    std::vector<Var> xs;
    xs.reserve(ids.size());
    for (int id : ids) xs.push_back(maybe_dropout(tape, tape.embed(params.embedding, id), opts));
    return xs;
}

struct SlotGraph {
    Var pooled;
    Var weights;
};

Var attention_vector(Tape& tape, NeuralParams& params, const corpus::TaskInstance& inst,
                     int slot, const ForwardOptions& opts) {
    const auto ids = attention_source_ids(params, inst, slot);
    const auto xs = embed_sequence(tape, params, ids, opts);
    const auto hs = bilstm(tape, xs, {&params.att_wf, &params.att_uf, &params.att_bf},
                           {&params.att_wb, &params.att_ub, &params.att_bb}, params.hidden_dim);
    return tape.max_pool(hs);
}

SlotGraph warrant_slot(Tape& tape, NeuralParams& params, const corpus::TaskInstance& inst,
                       int slot, Var att_vec, const ForwardOptions& opts) {
    const std::string& warrant = slot == 0 ? inst.warrant0 : inst.warrant1;
    const auto ids = field_ids(params, warrant);
    if (ids.empty())
        throw Error("instance '" + inst.instance_id + "': warrant" + std::to_string(slot) +
                    " empty after tokenization");
    const auto xs = embed_sequence(tape, params, ids, opts);
    const auto hs = bilstm(tape, xs, {&params.war_wf, &params.war_uf, &params.war_bf},
                           {&params.war_wb, &params.war_ub, &params.war_bb}, params.hidden_dim);

    const Var proj_h = tape.leaf(params.att_proj_h);
    const Var proj_a = tape.leaf(params.att_proj_a);
    const Var score_v = tape.leaf(params.att_score);
    const Var projected_att = tape.matmul(proj_a, att_vec);
    Mat scores0(static_cast<Eigen::Index>(hs.size()), 1);
    std::vector<Var> score_vars(hs.size());
    // scores_t = v^T tanh(P_h h_t + P_a a)
    for (size_t t = 0; t < hs.size(); ++t)
        score_vars[t] = tape.dot(
            score_v, tape.tanh_(tape.add(tape.matmul(proj_h, hs[t]), projected_att)));
    // Stack the scalar scores into one column for the softmax.
    Var scores = score_vars[0];
    for (size_t t = 1; t < hs.size(); ++t) scores = tape.vstack(scores, score_vars[t]);
    const Var weights = tape.softmax(scores);
    SlotGraph graph;
    graph.weights = weights;
    graph.pooled = maybe_dropout(tape, tape.attention_pool(hs, weights), opts);
    return graph;
}

} // namespace

std::string Variant::name() const {
    std::string n = intra_warrant ? "intra-warrant attention" : "attention";
    if (with_context) n += " w/ context";
    return n;
}

std::vector<Tensor*> NeuralParams::tensors() {
    return {&embedding, &att_wf,     &att_uf,     &att_bf,    &att_wb, &att_ub,
            &att_bb,    &war_wf,     &war_uf,     &war_bf,    &war_wb, &war_ub,
            &war_bb,    &att_proj_h, &att_proj_a, &att_score, &cls_w,  &cls_b};
}

std::vector<const Tensor*> NeuralParams::tensors() const {
    auto* self = const_cast<NeuralParams*>(this);
    std::vector<const Tensor*> out;
    for (Tensor* t : self->tensors()) out.push_back(t);
    return out;
}

int NeuralParams::token_id(const std::string& token) const {
    const auto it = token_ids.find(token);
    return it == token_ids.end() ? 0 : it->second;
}

void NeuralParams::zero_grads() {
    for (Tensor* t : tensors()) t->zero_grad();
}

NeuralParams init_params(const std::vector<corpus::TaskInstance>& instances, Variant variant,
                         int embed_dim, int hidden_dim, std::uint64_t seed) {
    if (embed_dim < 1 || hidden_dim < 1) throw Error("init_params: dimensions must be >= 1");
    NeuralParams p;
    p.embed_dim = embed_dim;
    p.hidden_dim = hidden_dim;
    p.variant = variant;
    p.seed = seed;

    std::set<std::string> tokens;
    for (const auto& inst : instances) {
        for (const std::string* field : {&inst.reason, &inst.claim, &inst.warrant0,
                                         &inst.warrant1, &inst.debate_title, &inst.debate_info})
            for (const auto& tok : text::tokenize(*field)) tokens.insert(tok);
    }
    p.vocab.push_back(kUnk);
    for (const auto& tok : tokens) p.vocab.push_back(tok);
    for (size_t i = 0; i < p.vocab.size(); ++i) p.token_ids[p.vocab[i]] = static_cast<int>(i);

    Rng rng(mix_seed(seed, "init"));
    const int v = static_cast<int>(p.vocab.size());
    const int d = hidden_dim;
    const int e = embed_dim;
    Mat emb(v, e);
    for (Eigen::Index i = 0; i < emb.rows(); ++i)
        for (Eigen::Index j = 0; j < emb.cols(); ++j) emb(i, j) = rng.normal() * 0.1;
    p.embedding = Tensor("embedding", std::move(emb));

    auto lstm_tensors = [&](const std::string& prefix, Tensor& w, Tensor& u, Tensor& b) {
        w = Tensor(prefix + ".w", glorot(rng, 4 * d, e));
        u = Tensor(prefix + ".u", glorot(rng, 4 * d, d));
        b = Tensor(prefix + ".b", Mat::Zero(4 * d, 1));
    };
    lstm_tensors("att_fwd", p.att_wf, p.att_uf, p.att_bf);
    lstm_tensors("att_bwd", p.att_wb, p.att_ub, p.att_bb);
    lstm_tensors("war_fwd", p.war_wf, p.war_uf, p.war_bf);
    lstm_tensors("war_bwd", p.war_wb, p.war_ub, p.war_bb);

    p.att_proj_h = Tensor("att_proj_h", glorot(rng, d, 2 * d));
    p.att_proj_a = Tensor("att_proj_a", glorot(rng, d, 2 * d));
    p.att_score = Tensor("att_score", glorot(rng, d, 1));
    p.cls_w = Tensor("cls_w", Mat::Zero(4 * d, 1));
    p.cls_b = Tensor("cls_b", Mat::Zero(1, 1));
    return p;
}

void load_pretrained_embeddings(NeuralParams& params, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::string line;
    size_t row = 0;
    size_t loaded = 0;
    while (std::getline(in, line)) {
        ++row;
        if (text::trim(line).empty()) continue;
        std::vector<std::string> parts;
        for (const auto& part : text::split(line, ' '))
            if (!part.empty()) parts.push_back(part);
        if (parts.size() != static_cast<size_t>(params.embed_dim) + 1)
            throw Error(path + ": row " + std::to_string(row) + ": expected " +
                        std::to_string(params.embed_dim) + " values");
        const auto it = params.token_ids.find(parts[0]);
        if (it == params.token_ids.end()) continue;
        for (int j = 0; j < params.embed_dim; ++j)
            params.embedding.value(it->second, j) = std::stod(parts[static_cast<size_t>(j) + 1]);
        ++loaded;
    }
    if (loaded == 0) throw Error(path + ": no embeddings matched the vocabulary");
}

Var build_logit(Tape& tape, NeuralParams& params, const corpus::TaskInstance& instance,
                const ForwardOptions& opts) {
    Var att0, att1;
    if (params.variant.intra_warrant) {
        att0 = attention_vector(tape, params, instance, 0, opts);
        att1 = attention_vector(tape, params, instance, 1, opts);
    } else {
        att0 = attention_vector(tape, params, instance, 0, opts);
        att1 = att0; // the standard variant shares one attention vector
    }
    const SlotGraph slot0 = warrant_slot(tape, params, instance, 0, att0, opts);
    const SlotGraph slot1 = warrant_slot(tape, params, instance, 1, att1, opts);
    const Var features = tape.vstack(slot0.pooled, slot1.pooled);
    return tape.add(tape.dot(tape.leaf(params.cls_w), features), tape.leaf(params.cls_b));
}

double forward_prob(NeuralParams& params, const corpus::TaskInstance& instance) {
    Tape tape;
    const Var logit = build_logit(tape, params, instance, ForwardOptions{});
    return sigmoid(tape.value(logit)(0, 0));
}

Eigen::VectorXd encode_attention_source(NeuralParams& params,
                                        const corpus::TaskInstance& instance, int slot) {
    Tape tape;
    const Var v = attention_vector(tape, params, instance, slot, ForwardOptions{});
    return tape.value(v).col(0);
}

namespace {

SlotGraph slot_graph(Tape& tape, NeuralParams& params, const corpus::TaskInstance& instance,
                     int slot) {
    const ForwardOptions opts;
    Var att;
    if (params.variant.intra_warrant || slot == 0)
        att = attention_vector(tape, params, instance, slot, opts);
    else
        att = attention_vector(tape, params, instance, 0, opts);
    return warrant_slot(tape, params, instance, slot, att, opts);
}

} // namespace

Eigen::VectorXd attention_weights(NeuralParams& params, const corpus::TaskInstance& instance,
                                  int slot) {
    Tape tape;
    return tape.value(slot_graph(tape, params, instance, slot).weights).col(0);
}

Eigen::VectorXd pooled_warrant(NeuralParams& params, const corpus::TaskInstance& instance,
                               int slot) {
    Tape tape;
    return tape.value(slot_graph(tape, params, instance, slot).pooled).col(0);
}

} // namespace arct::neural
