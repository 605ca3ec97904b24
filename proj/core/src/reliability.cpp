#include "arct/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "arct/agreement.hpp"
#include "arct/error.hpp"
#include "arct/random.hpp"

namespace arct::reliability {

namespace {

using crowd::WorkerResponse;

std::map<std::string, std::vector<WorkerResponse>> group_by_item(
    const std::vector<WorkerResponse>& responses) {
    std::map<std::string, std::vector<WorkerResponse>> by_item;
    for (const auto& r : responses) by_item[r.item_id].push_back(r);
    for (auto& [item, rs] : by_item) {
        std::sort(rs.begin(), rs.end(), [](const WorkerResponse& a, const WorkerResponse& b) {
            if (a.submission_time != b.submission_time) return a.submission_time < b.submission_time;
            return a.worker_id < b.worker_id;
        });
    }
    return by_item;
}

double population_std(const std::vector<double>& xs, double mean) {
    if (xs.empty()) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

} // namespace

std::pair<std::vector<WorkerResponse>, std::vector<WorkerResponse>> split_by_submission_time(
    const std::vector<WorkerResponse>& responses) {
    std::pair<std::vector<WorkerResponse>, std::vector<WorkerResponse>> out;
    for (auto& [item, rs] : group_by_item(responses)) {
        if (rs.size() < 2 || rs.size() % 2 != 0)
            throw Error("split_by_submission_time: item '" + item +
                        "' has an odd or insufficient response count (" +
                        std::to_string(rs.size()) + ")");
        const size_t half = rs.size() / 2;
        out.first.insert(out.first.end(), rs.begin(), rs.begin() + half);
        out.second.insert(out.second.end(), rs.begin() + half, rs.end());
    }
    return out;
}

std::vector<ReliabilityCurvePoint> reliability_curve(const std::vector<WorkerResponse>& responses,
                                                     const std::vector<int>& k_range,
                                                     const std::vector<double>& keep_fractions,
                                                     int repeats,
                                                     const crowd::AggregationConfig& config) {
    if (repeats < 1) throw Error("reliability_curve: repeats must be >= 1");
    for (double f : keep_fractions)
        if (!(f > 0.0 && f <= 1.0))
            throw Error("reliability_curve: keep_fraction must be in (0, 1]");

    const auto [group_a, group_b] = split_by_submission_time(responses);
    const auto a_by_item = group_by_item(group_a);
    const auto b_by_item = group_by_item(group_b);

    size_t group_size = SIZE_MAX;
    for (const auto& [item, rs] : a_by_item) group_size = std::min(group_size, rs.size());
    for (int k : k_range)
        if (k < 1 || static_cast<size_t>(k) > group_size)
            throw Error("reliability_curve: k = " + std::to_string(k) +
                        " exceeds the per-group size " + std::to_string(group_size));

    std::vector<std::string> all_items;
    for (const auto& [item, rs] : a_by_item) all_items.push_back(item);
    const double n_items = static_cast<double>(all_items.size());

    std::vector<ReliabilityCurvePoint> points;
    for (int k : k_range) {
        for (size_t fi = 0; fi < keep_fractions.size(); ++fi) {
            const double fraction = keep_fractions[fi];
            ReliabilityCurvePoint point;
            point.crowd_size_k = k;
            point.keep_fraction = fraction;

            std::vector<double> kappas;
            std::vector<double> coverages;
            for (int rep = 0; rep < repeats; ++rep) {
                const std::uint64_t rep_seed = mix_seed(
                    mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(k)),
                             static_cast<std::uint64_t>(fi)),
                    static_cast<std::uint64_t>(rep));
                Rng rng(rep_seed);

                auto sample_group =
                    [&](const std::map<std::string, std::vector<WorkerResponse>>& by_item) {
                        std::vector<WorkerResponse> sampled;
                        for (const auto& item : all_items) {
                            const auto& rs = by_item.at(item);
                            for (size_t idx :
                                 rng.sample_indices(rs.size(), static_cast<size_t>(k)))
                                sampled.push_back(rs[idx]);
                        }
                        return sampled;
                    };
                const auto sample_a = sample_group(a_by_item);
                const auto sample_b = sample_group(b_by_item);

                crowd::AggregationConfig fit_cfg = config;
                fit_cfg.seed = mix_seed(rep_seed, 1);
                const auto model_a = crowd::mace_fit(sample_a, fit_cfg);
                fit_cfg.seed = mix_seed(rep_seed, 2);
                const auto model_b = crowd::mace_fit(sample_b, fit_cfg);
                const auto pred_a = crowd::threshold_predictions(model_a, fraction);
                const auto pred_b = crowd::threshold_predictions(model_b, fraction);

                agreement::LabelSeriesPair pair;
                for (const auto& [item, label] : pred_a) {
                    const auto it = pred_b.find(item);
                    if (it == pred_b.end()) continue;
                    pair.items.push_back(item);
                    pair.labels_a.push_back(label);
                    pair.labels_b.push_back(it->second);
                }
                if (pair.items.empty()) {
                    ++point.skipped;
                    continue;
                }
                const auto kappa = agreement::cohen_kappa(pair);
                if (!kappa) {
                    ++point.skipped;
                    continue;
                }
                kappas.push_back(*kappa);
                coverages.push_back(static_cast<double>(pair.items.size()) / n_items);
            }
            if (kappas.empty())
                throw Error("reliability_curve: every repeat skipped at k = " +
                            std::to_string(k) + ", fraction = " + std::to_string(fraction));

            point.repeats = static_cast<int>(kappas.size());
            double mean = 0.0;
            for (double v : kappas) mean += v;
            mean /= static_cast<double>(kappas.size());
            point.mean_kappa = mean;
            point.std_kappa = population_std(kappas, mean);
            double cov = 0.0;
            for (double v : coverages) cov += v;
            point.mean_coverage = cov / static_cast<double>(coverages.size());
            points.push_back(point);
        }
    }
    return points;
}

void save_curve_csv(const std::vector<ReliabilityCurvePoint>& points, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "k,keep_fraction,mean_kappa,std_kappa,mean_coverage,repeats\n";
    out.precision(17);
    for (const auto& p : points)
        out << p.crowd_size_k << ',' << p.keep_fraction << ',' << p.mean_kappa << ','
            << p.std_kappa << ',' << p.mean_coverage << ',' << p.repeats << "\n";
    if (!out) throw Error("write failed: " + path);
}

void save_curve_svg(const std::vector<ReliabilityCurvePoint>& points, const std::string& path) {
    if (points.empty()) throw Error("save_curve_svg: no points");

    const double width = 640, height = 420;
    const double ml = 60, mr = 20, mt = 20, mb = 50;
    int k_min = points.front().crowd_size_k, k_max = k_min;
    double y_min = 0.0, y_max = 1.0;
    for (const auto& p : points) {
        k_min = std::min(k_min, p.crowd_size_k);
        k_max = std::max(k_max, p.crowd_size_k);
        y_min = std::min(y_min, p.mean_kappa);
        y_max = std::max(y_max, p.mean_kappa);
    }
    const double x_span = std::max(1, k_max - k_min);
    const double y_span = std::max(1e-9, y_max - y_min);
    auto x_of = [&](int k) {
        return ml + (width - ml - mr) * (static_cast<double>(k - k_min) / x_span);
    };
    auto y_of = [&](double v) { return height - mb - (height - mt - mb) * ((v - y_min) / y_span); };

    std::set<double> fractions;
    for (const auto& p : points) fractions.insert(p.keep_fraction);
    const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                             "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    for (int k = k_min; k <= k_max; ++k) {
        out << "<text x=\"" << x_of(k) << "\" y=\"" << height - mb + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << k << "</text>\n";
    }
    for (double v = std::ceil(y_min * 5) / 5; v <= y_max + 1e-9; v += 0.2) {
        out << "<text x=\"" << ml - 8 << "\" y=\"" << y_of(v) + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << v << "</text>\n";
        out << "<line x1=\"" << ml << "\" y1=\"" << y_of(v) << "\" x2=\"" << width - mr
            << "\" y2=\"" << y_of(v) << "\" stroke=\"#dddddd\"/>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"12\" text-anchor=\"middle\">crowd size k</text>\n";
    out << "<text x=\"16\" y=\"" << (mt + height - mb) / 2
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (mt + height - mb) / 2 << ")\">mean Cohen&#39;s kappa</text>\n";

    size_t color = 0;
    double legend_y = mt + 10;
    for (double f : fractions) {
        const char* stroke = palette[color % (sizeof(palette) / sizeof(palette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
        for (const auto& p : points)
            if (p.keep_fraction == f) out << x_of(p.crowd_size_k) << ',' << y_of(p.mean_kappa) << ' ';
        out << "\"/>\n";
        out << "<text x=\"" << width - mr - 120 << "\" y=\"" << legend_y
            << "\" font-size=\"11\" fill=\"" << stroke << "\">keep " << f << "</text>\n";
        legend_y += 14;
        ++color;
    }
    out << "</svg>\n";
    if (!out) throw Error("write failed: " + path);
}

} // namespace arct::reliability
