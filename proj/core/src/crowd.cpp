#include "arct/crowd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "arct/error.hpp"
#include "arct/random.hpp"
#include "arct/text.hpp"

namespace arct::crowd {

namespace {

using nlohmann::json;

constexpr double kThetaFloor = 1e-9;
constexpr double kXiFloor = 1e-12;

struct Problem {
    std::vector<std::string> item_ids;   // sorted
    std::vector<std::string> worker_ids; // sorted
    std::vector<std::string> labels;     // sorted
    // Per item: (worker index, label index), sorted by worker index.
    std::vector<std::vector<std::pair<int, int>>> items;
    std::vector<int> worker_totals;
};

Problem index_responses(const std::vector<WorkerResponse>& responses,
                        const std::vector<std::string>& explicit_labels) {
    if (responses.empty()) throw Error("mace_fit: no responses");

    Problem p;
    std::set<std::string> items, workers, labels;
    for (const auto& r : responses) {
        items.insert(r.item_id);
        workers.insert(r.worker_id);
        labels.insert(r.label);
    }
    if (explicit_labels.empty()) {
        p.labels.assign(labels.begin(), labels.end());
    } else {
        p.labels = explicit_labels;
        std::sort(p.labels.begin(), p.labels.end());
        p.labels.erase(std::unique(p.labels.begin(), p.labels.end()), p.labels.end());
        for (const auto& l : labels)
            if (!std::binary_search(p.labels.begin(), p.labels.end(), l))
                throw Error("mace_fit: response label '" + l + "' not in the declared label set");
    }
    if (p.labels.size() < 2) throw Error("mace_fit: degenerate label set (need >= 2 labels)");

    p.item_ids.assign(items.begin(), items.end());
    p.worker_ids.assign(workers.begin(), workers.end());
    p.items.resize(p.item_ids.size());
    p.worker_totals.assign(p.worker_ids.size(), 0);

    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : responses) {
        if (!seen.emplace(r.item_id, r.worker_id).second)
            throw Error("duplicate response: item '" + r.item_id + "', worker '" + r.worker_id +
                        "'");
        const int i = static_cast<int>(std::lower_bound(p.item_ids.begin(), p.item_ids.end(),
                                                        r.item_id) -
                                       p.item_ids.begin());
        const int j = static_cast<int>(std::lower_bound(p.worker_ids.begin(), p.worker_ids.end(),
                                                        r.worker_id) -
                                       p.worker_ids.begin());
        const int l = static_cast<int>(std::lower_bound(p.labels.begin(), p.labels.end(),
                                                        r.label) -
                                       p.labels.begin());
        p.items[i].emplace_back(j, l);
        p.worker_totals[j] += 1;
    }
    for (auto& item : p.items) std::sort(item.begin(), item.end());
    return p;
}

struct Fit {
    std::vector<double> theta;
    std::vector<std::vector<double>> xi;
    std::vector<std::vector<double>> posteriors;
    double log_likelihood = 0.0;
    std::vector<double> objective;
};

// One EM run. The objective history gets em_iterations + 1 entries: the
// value at the random initialization and after each M-step.
Fit fit_once(const Problem& p, const AggregationConfig& cfg, std::uint64_t restart_seed) {
    const size_t nw = p.worker_ids.size();
    const size_t ni = p.items.size();
    const size_t nl = p.labels.size();
    const double delta = cfg.smoothing_delta;

    Rng rng(restart_seed);
    Fit fit;
    fit.theta.resize(nw);
    for (auto& t : fit.theta) t = rng.uniform(0.3, 0.9);
    // Uniform spam-distribution init keeps the fit equivariant under label
    // renaming; restart diversity comes from theta.
    fit.xi.assign(nw, std::vector<double>(nl, 1.0 / static_cast<double>(nl)));

    std::vector<double> c0(nw);
    std::vector<std::vector<double>> cspam(nw, std::vector<double>(nl));
    std::vector<double> unnorm(nl);
    fit.posteriors.assign(ni, std::vector<double>(nl, 0.0));

    for (int iter = 0;; ++iter) {
        std::fill(c0.begin(), c0.end(), 0.0);
        for (auto& row : cspam) std::fill(row.begin(), row.end(), 0.0);

        double ll = 0.0;
        for (size_t i = 0; i < ni; ++i) {
            const double prior = 1.0 / static_cast<double>(nl);
            for (size_t t = 0; t < nl; ++t) {
                double prod = prior;
                for (const auto& [j, a] : p.items[i]) {
                    const double match = (static_cast<size_t>(a) == t) ? fit.theta[j] : 0.0;
                    prod *= match + (1.0 - fit.theta[j]) * fit.xi[j][a];
                }
                unnorm[t] = prod;
            }
            double z = 0.0;
            for (double v : unnorm) z += v;
            ll += std::log(z);
            for (size_t t = 0; t < nl; ++t) fit.posteriors[i][t] = unnorm[t] / z;

            for (const auto& [j, a] : p.items[i]) {
                // P(not spam | T = a) for this response.
                const double denom = fit.theta[j] + (1.0 - fit.theta[j]) * fit.xi[j][a];
                const double p_true = fit.theta[j] / denom;
                const double g = fit.posteriors[i][a];
                c0[j] += g * p_true;
                cspam[j][a] += 1.0 - g * p_true;
            }
        }

        double objective = ll;
        if (delta > 0.0) {
            for (size_t j = 0; j < nw; ++j) {
                objective += delta * (std::log(fit.theta[j]) + std::log(1.0 - fit.theta[j]));
                for (size_t l = 0; l < nl; ++l) objective += delta * std::log(fit.xi[j][l]);
            }
        }
        fit.objective.push_back(objective);
        if (iter == cfg.em_iterations) {
            fit.log_likelihood = ll;
            break;
        }

        for (size_t j = 0; j < nw; ++j) {
            const double n = static_cast<double>(p.worker_totals[j]);
            double t = (c0[j] + delta) / (n + 2.0 * delta);
            fit.theta[j] = std::clamp(t, kThetaFloor, 1.0 - kThetaFloor);
            double total = 0.0;
            for (double v : cspam[j]) total += v;
            if (total + static_cast<double>(nl) * delta <= 0.0) {
                // No spam evidence at all; the likelihood is flat in xi.
                std::fill(fit.xi[j].begin(), fit.xi[j].end(), 1.0 / static_cast<double>(nl));
            } else {
                double z = 0.0;
                for (size_t l = 0; l < nl; ++l) {
                    fit.xi[j][l] = std::max((cspam[j][l] + delta), kXiFloor);
                    z += fit.xi[j][l];
                }
                for (auto& v : fit.xi[j]) v /= z;
            }
        }
    }
    return fit;
}

} // namespace

int WorkerModel::label_index(const std::string& label) const {
    const auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) throw Error("unknown label: '" + label + "'");
    return static_cast<int>(it - labels.begin());
}

std::string WorkerModel::posterior_argmax(const std::string& item_id) const {
    const auto it = posteriors.find(item_id);
    if (it == posteriors.end()) throw Error("no posterior for item '" + item_id + "'");
    const auto& post = it->second;
    size_t best = 0;
    for (size_t l = 1; l < post.size(); ++l)
        if (post[l] > post[best]) best = l;
    return labels[best];
}

MajorityResult majority_vote(const std::vector<WorkerResponse>& responses,
                             const std::vector<std::string>& expected_items) {
    MajorityResult result;
    std::map<std::string, std::map<std::string, int>> votes;
    for (const auto& r : responses) votes[r.item_id][r.label] += 1;
    for (const auto& [item, counts] : votes) {
        MajorityEntry entry;
        int best = 0;
        int winners = 0;
        for (const auto& [label, count] : counts) {
            if (count > best) {
                best = count;
                entry.label = label;
                winners = 1;
            } else if (count == best) {
                ++winners; // label order is lexicographic, first winner stays
            }
        }
        entry.tie = winners > 1;
        result.by_item[item] = entry;
    }
    for (const auto& item : expected_items)
        if (!votes.count(item)) result.excluded_items.push_back(item);
    return result;
}

WorkerModel mace_fit(const std::vector<WorkerResponse>& responses,
                     const AggregationConfig& config) {
    if (config.em_iterations < 1) throw Error("mace_fit: em_iterations must be >= 1");
    if (config.restarts < 1) throw Error("mace_fit: restarts must be >= 1");
    if (config.smoothing_delta < 0) throw Error("mace_fit: smoothing_delta must be >= 0");

    const Problem p = index_responses(responses, config.label_set);

    Fit best;
    bool have_best = false;
    for (int r = 0; r < config.restarts; ++r) {
        Fit fit = fit_once(p, config, mix_seed(config.seed, static_cast<std::uint64_t>(r)));
        if (!have_best || fit.objective.back() > best.objective.back()) {
            best = std::move(fit);
            have_best = true;
        }
    }

    WorkerModel model;
    model.labels = p.labels;
    for (size_t j = 0; j < p.worker_ids.size(); ++j) {
        model.competences[p.worker_ids[j]] = best.theta[j];
        model.spam_dists[p.worker_ids[j]] = best.xi[j];
    }
    for (size_t i = 0; i < p.item_ids.size(); ++i)
        model.posteriors[p.item_ids[i]] = best.posteriors[i];
    model.log_likelihood = best.log_likelihood;
    model.objective_history = best.objective;
    return model;
}

std::map<std::string, std::string> threshold_predictions(const WorkerModel& model,
                                                         double keep_fraction) {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
        throw Error("threshold_predictions: keep_fraction must be in (0, 1]");
    if (model.posteriors.empty()) throw Error("threshold_predictions: model has no posteriors");

    struct Row {
        double confidence;
        const std::string* item;
        size_t argmax;
    };
    std::vector<Row> rows;
    rows.reserve(model.posteriors.size());
    for (const auto& [item, post] : model.posteriors) {
        size_t best = 0;
        for (size_t l = 1; l < post.size(); ++l)
            if (post[l] > post[best]) best = l;
        rows.push_back({post[best], &item, best});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.confidence != b.confidence) return a.confidence > b.confidence;
        return *a.item < *b.item;
    });

    const size_t n = rows.size();
    // ceil(fraction * n), with an epsilon so a mathematically integral
    // product is not pushed up by float noise; at least one item stays.
    size_t keep = static_cast<size_t>(std::ceil(keep_fraction * static_cast<double>(n) - 1e-12));
    keep = std::clamp<size_t>(keep, 1, n);
    std::map<std::string, std::string> out;
    for (size_t i = 0; i < keep; ++i) out[*rows[i].item] = model.labels[rows[i].argmax];
    return out;
}

std::vector<WorkerResponse> load_responses(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::vector<WorkerResponse> out;
    std::string line;
    size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (text::trim(line).empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(path + ": row " + std::to_string(row) + ": invalid JSON: " + e.what());
        }
        WorkerResponse r;
        try {
            r.item_id = obj.at("itemId").get<std::string>();
            r.worker_id = obj.at("workerId").get<std::string>();
            r.submission_time = text::parse_iso8601_utc(obj.at("submissionTime").get<std::string>());
            r.label = obj.at("label").get<std::string>();
        } catch (const json::exception& e) {
            throw Error(path + ": row " + std::to_string(row) + ": " + e.what());
        }
        out.push_back(std::move(r));
    }
    return out;
}

void save_responses(const std::vector<WorkerResponse>& responses, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    for (const auto& r : responses) {
        const json obj = {{"itemId", r.item_id},
                          {"workerId", r.worker_id},
                          {"submissionTime", text::format_iso8601_utc(r.submission_time)},
                          {"label", r.label}};
        out << obj.dump() << "\n";
    }
    if (!out) throw Error("write failed: " + path);
}

std::map<std::string, std::pair<std::string, double>> load_predictions_tsv(
    const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line) || text::split(line, '\t') !=
                                       std::vector<std::string>{"itemId", "label", "confidence"})
        throw Error(path + ": expected header 'itemId\\tlabel\\tconfidence'");
    std::map<std::string, std::pair<std::string, double>> out;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (text::trim(line).empty()) continue;
        const auto cols = text::split(line, '\t');
        if (cols.size() != 3)
            throw Error(path + ": row " + std::to_string(row) + ": expected 3 columns");
        try {
            out[cols[0]] = {cols[1], std::stod(cols[2])};
        } catch (const std::exception&) {
            throw Error(path + ": row " + std::to_string(row) + ": bad confidence");
        }
    }
    return out;
}

void save_predictions_tsv(const WorkerModel& model,
                          const std::map<std::string, std::string>& predictions,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "itemId\tlabel\tconfidence\n";
    out.precision(17);
    for (const auto& [item, label] : predictions) {
        const auto& post = model.posteriors.at(item);
        double conf = 0.0;
        for (double v : post) conf = std::max(conf, v);
        out << item << '\t' << label << '\t' << conf << "\n";
    }
    if (!out) throw Error("write failed: " + path);
}

} // namespace arct::crowd
