#include "arct/neural/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "arct/error.hpp"

namespace arct::neural {

namespace {

using nlohmann::json;

struct Adam {
    std::vector<Mat> m, v;
    long step = 0;

    explicit Adam(NeuralParams& params) {
        for (Tensor* t : params.tensors()) {
            m.push_back(Mat::Zero(t->value.rows(), t->value.cols()));
            v.push_back(Mat::Zero(t->value.rows(), t->value.cols()));
        }
    }

    void update(NeuralParams& params, const TrainConfig& cfg) {
        ++step;
        const auto tensors = params.tensors();
        const double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
        for (size_t i = 0; i < tensors.size(); ++i) {
            Tensor& t = *tensors[i];
            if (&t == &params.embedding && !params.train_embeddings) continue;
            m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * t.grad;
            v[i] = cfg.adam_beta2 * v[i] +
                   (1.0 - cfg.adam_beta2) * t.grad.cwiseProduct(t.grad);
            const Mat mhat = m[i] / bc1;
            const Mat vhat = v[i] / bc2;
            t.value -=
                cfg.learning_rate *
                (mhat.array() / (vhat.array().sqrt() + cfg.adam_epsilon)).matrix();
        }
    }
};

corpus::TaskInstance permuted(const corpus::TaskInstance& inst) {
    corpus::TaskInstance flipped = inst;
    std::swap(flipped.warrant0, flipped.warrant1);
    flipped.label = 1 - inst.label;
    flipped.instance_id = inst.instance_id + "#swap";
    return flipped;
}

double dev_accuracy(NeuralParams& params, const std::vector<corpus::TaskInstance>& dev) {
    int correct = 0;
    for (const auto& inst : dev)
        if ((forward_prob(params, inst) >= 0.5 ? 1 : 0) == inst.label) ++correct;
    return static_cast<double>(correct) / static_cast<double>(dev.size());
}

void write_tensor(std::ofstream& out, const Tensor& t) {
    const std::uint32_t name_len = static_cast<std::uint32_t>(t.name.size());
    out.write(reinterpret_cast<const char*>(&name_len), sizeof(name_len));
    out.write(t.name.data(), name_len);
    const std::uint64_t rows = static_cast<std::uint64_t>(t.value.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(t.value.cols());
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    out.write(reinterpret_cast<const char*>(t.value.data()),
              static_cast<std::streamsize>(sizeof(double) * t.value.size()));
}

void read_tensor(std::ifstream& in, Tensor& t, const std::string& path) {
    std::uint32_t name_len = 0;
    in.read(reinterpret_cast<char*>(&name_len), sizeof(name_len));
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    std::uint64_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    if (!in) throw Error(path + ": truncated tensor header");
    if (name != t.name)
        throw Error(path + ": tensor order mismatch, expected '" + t.name + "', found '" + name +
                    "'");
    t.value.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    in.read(reinterpret_cast<char*>(t.value.data()),
            static_cast<std::streamsize>(sizeof(double) * t.value.size()));
    if (!in) throw Error(path + ": truncated tensor data");
    t.grad = Mat::Zero(t.value.rows(), t.value.cols());
}

} // namespace

std::vector<corpus::TaskInstance> double_with_permutations(
    const std::vector<corpus::TaskInstance>& instances) {
    std::vector<corpus::TaskInstance> pool;
    pool.reserve(instances.size() * 2);
    for (const auto& inst : instances) {
        pool.push_back(inst);
        pool.push_back(permuted(inst));
    }
    return pool;
}

TrainResult train(const corpus::DataSplit& split, const TrainConfig& config, Variant variant) {
    if (split.train.empty()) throw Error("train: empty training set");
    if (split.dev.empty()) throw Error("train: empty dev set");
    if (config.dropout_rate < 0.0 || config.dropout_rate >= 1.0)
        throw Error("train: dropout_rate must be in [0, 1)");
    if (config.patience_epochs < 1) throw Error("train: patience_epochs must be >= 1");

    NeuralParams params = init_params(split.train, variant, config.embed_dim, config.hidden_dim,
                                      config.seed);
    params.train_embeddings = config.train_embeddings;
    if (!config.pretrained_embeddings.empty())
        load_pretrained_embeddings(params, config.pretrained_embeddings);

    const std::vector<corpus::TaskInstance> pool = double_with_permutations(split.train);

    Adam adam(params);
    Rng shuffle_rng(mix_seed(config.seed, "shuffle"));
    Rng dropout_rng(mix_seed(config.seed, "dropout"));

    TrainResult result;
    result.params = params;
    int since_best = 0;

    std::vector<size_t> order(pool.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        for (size_t start = 0; start < order.size();
             start += static_cast<size_t>(config.batch_size)) {
            const size_t end =
                std::min(order.size(), start + static_cast<size_t>(config.batch_size));
            params.zero_grads();
            for (size_t i = start; i < end; ++i) {
                const auto& inst = pool[order[i]];
                Tape tape;
                ForwardOptions opts;
                opts.dropout_rate = config.dropout_rate;
                opts.dropout_rng = config.dropout_rate > 0.0 ? &dropout_rng : nullptr;
                const Var logit = build_logit(tape, params, inst, opts);
                const Var loss =
                    tape.logistic_loss(logit, static_cast<double>(inst.label));
                loss_sum += tape.value(loss)(0, 0);
                tape.backward(loss);
            }
            const double scale = 1.0 / static_cast<double>(end - start);
            for (Tensor* t : params.tensors()) t->grad *= scale;
            adam.update(params, config);
        }
        const double mean_loss = loss_sum / static_cast<double>(pool.size());

        bool finite = std::isfinite(mean_loss);
        for (const Tensor* t : params.tensors()) finite = finite && t->value.allFinite();
        if (!finite) {
            result.diverged = true;
            return result;
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = mean_loss;
        stats.dev_accuracy = dev_accuracy(params, split.dev);
        result.history.push_back(stats);

        if (stats.dev_accuracy > result.best_dev_accuracy || result.best_epoch == 0) {
            result.best_dev_accuracy = stats.dev_accuracy;
            result.best_epoch = epoch;
            result.params = params;
            since_best = 0;
        } else {
            ++since_best;
            if (since_best >= config.patience_epochs) break;
        }
    }
    return result;
}

std::vector<int> predict(NeuralParams& params,
                         const std::vector<corpus::TaskInstance>& instances) {
    std::vector<int> labels;
    labels.reserve(instances.size());
    for (const auto& inst : instances)
        labels.push_back(forward_prob(params, inst) >= 0.5 ? 1 : 0);
    return labels;
}

double grad_check(NeuralParams& params, const corpus::TaskInstance& instance, double epsilon,
                  int min_coords_per_tensor, std::uint64_t seed) {
    const double target = static_cast<double>(instance.label);
    auto loss_at = [&]() {
        Tape tape;
        const Var logit = build_logit(tape, params, instance, ForwardOptions{});
        return tape.value(tape.logistic_loss(logit, target))(0, 0);
    };

    params.zero_grads();
    {
        Tape tape;
        const Var logit = build_logit(tape, params, instance, ForwardOptions{});
        const Var loss = tape.logistic_loss(logit, target);
        tape.backward(loss);
    }

    Rng rng(mix_seed(seed, "grad_check"));
    double worst = 0.0;
    for (Tensor* t : params.tensors()) {
        const Eigen::Index size = t->value.size();
        std::vector<Eigen::Index> coords;
        if (size <= min_coords_per_tensor) {
            for (Eigen::Index i = 0; i < size; ++i) coords.push_back(i);
        } else {
            for (int i = 0; i < min_coords_per_tensor; ++i)
                coords.push_back(
                    static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(size))));
        }
        for (const Eigen::Index c : coords) {
            const double orig = t->value(c);
            t->value(c) = orig + epsilon;
            const double up = loss_at();
            t->value(c) = orig - epsilon;
            const double down = loss_at();
            t->value(c) = orig;
            const double fd = (up - down) / (2.0 * epsilon);
            const double ad = t->grad(c);
            if (!std::isfinite(ad)) throw Error("grad_check: non-finite gradient in " + t->name);
            const double rel =
                std::abs(ad - fd) / std::max({std::abs(ad), std::abs(fd), 1e-3});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

void save_history_csv(const std::vector<EpochStats>& history, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "epoch,train_loss,dev_acc\n";
    out.precision(17);
    for (const auto& row : history)
        out << row.epoch << ',' << row.train_loss << ',' << row.dev_accuracy << "\n";
    if (!out) throw Error("write failed: " + path);
}

void save_params(const NeuralParams& params, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << "ARCTNN1\n";
    json manifest;
    manifest["embedDim"] = params.embed_dim;
    manifest["hiddenDim"] = params.hidden_dim;
    manifest["intraWarrant"] = params.variant.intra_warrant;
    manifest["withContext"] = params.variant.with_context;
    manifest["seed"] = params.seed;
    manifest["trainEmbeddings"] = params.train_embeddings;
    manifest["vocab"] = params.vocab;
    out << manifest.dump() << "\n";
    for (const Tensor* t : params.tensors()) write_tensor(out, *t);
    if (!out) throw Error("write failed: " + path);
}

NeuralParams load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path);
    std::string magic;
    std::getline(in, magic);
    if (magic != "ARCTNN1") throw Error(path + ": not an ARCTNN1 params file");
    std::string manifest_line;
    std::getline(in, manifest_line);
    json manifest;
    try {
        manifest = json::parse(manifest_line);
    } catch (const json::exception& e) {
        throw Error(path + ": bad manifest: " + e.what());
    }

    NeuralParams params;
    params.embed_dim = manifest.at("embedDim").get<int>();
    params.hidden_dim = manifest.at("hiddenDim").get<int>();
    params.variant.intra_warrant = manifest.at("intraWarrant").get<bool>();
    params.variant.with_context = manifest.at("withContext").get<bool>();
    params.seed = manifest.at("seed").get<std::uint64_t>();
    params.train_embeddings = manifest.at("trainEmbeddings").get<bool>();
    params.vocab = manifest.at("vocab").get<std::vector<std::string>>();
    for (size_t i = 0; i < params.vocab.size(); ++i)
        params.token_ids[params.vocab[i]] = static_cast<int>(i);

    // Seed tensor names/shapes via a throwaway init, then overwrite values.
    const int d = params.hidden_dim;
    const int e = params.embed_dim;
    const int v = static_cast<int>(params.vocab.size());
    params.embedding = Tensor("embedding", Mat::Zero(v, e));
    auto zero_lstm = [&](const std::string& prefix, Tensor& w, Tensor& u, Tensor& b) {
        w = Tensor(prefix + ".w", Mat::Zero(4 * d, e));
        u = Tensor(prefix + ".u", Mat::Zero(4 * d, d));
        b = Tensor(prefix + ".b", Mat::Zero(4 * d, 1));
    };
    zero_lstm("att_fwd", params.att_wf, params.att_uf, params.att_bf);
    zero_lstm("att_bwd", params.att_wb, params.att_ub, params.att_bb);
    zero_lstm("war_fwd", params.war_wf, params.war_uf, params.war_bf);
    zero_lstm("war_bwd", params.war_wb, params.war_ub, params.war_bb);
    params.att_proj_h = Tensor("att_proj_h", Mat::Zero(d, 2 * d));
    params.att_proj_a = Tensor("att_proj_a", Mat::Zero(d, 2 * d));
    params.att_score = Tensor("att_score", Mat::Zero(d, 1));
    params.cls_w = Tensor("cls_w", Mat::Zero(4 * d, 1));
    params.cls_b = Tensor("cls_b", Mat::Zero(1, 1));

    for (Tensor* t : params.tensors()) read_tensor(in, *t, path);
    return params;
}

} // namespace arct::neural
