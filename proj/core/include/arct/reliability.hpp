#pragma once

#include <string>
#include <utility>
#include <vector>

#include "arct/crowd.hpp"

namespace arct::reliability {

struct ReliabilityCurvePoint {
    int crowd_size_k = 0;
    double keep_fraction = 1.0;
    double mean_kappa = 0.0;
    double std_kappa = 0.0; // population std over successful repeats
    double mean_coverage = 0.0; // fraction of items confidently labeled by both groups
    int repeats = 0;            // successful repeats behind the means
    int skipped = 0;            // repeats without jointly labeled items or with undefined kappa
};

// Splits every item's responses into an earlier and a later half, two
// independent "experts from the crowd". Responses per item are ordered by
// submission time, ties by worker id. Items with an odd response count are
// an error naming the item.
std::pair<std::vector<crowd::WorkerResponse>, std::vector<crowd::WorkerResponse>>
split_by_submission_time(const std::vector<crowd::WorkerResponse>& responses);

// Sweeps crowd size and confidence threshold: for each (k, fraction) and
// repeat, samples k responses per item from each group without replacement,
// aggregates each group with the EM model, keeps the most confident
// predictions and scores Cohen's kappa over the items labeled in both
// groups. Deterministic for a given config seed; repeats that yield no
// jointly labeled items (or an undefined kappa) are skipped and counted.
std::vector<ReliabilityCurvePoint> reliability_curve(
    const std::vector<crowd::WorkerResponse>& responses, const std::vector<int>& k_range,
    const std::vector<double>& keep_fractions, int repeats,
    const crowd::AggregationConfig& config);

// CSV: k,keep_fraction,mean_kappa,std_kappa,mean_coverage,repeats
void save_curve_csv(const std::vector<ReliabilityCurvePoint>& points, const std::string& path);

// Line chart, one polyline per keep_fraction, kappa over crowd size.
void save_curve_svg(const std::vector<ReliabilityCurvePoint>& points, const std::string& path);

} // namespace arct::reliability
