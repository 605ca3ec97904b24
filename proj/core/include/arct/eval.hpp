#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "arct/corpus.hpp"

namespace arct::eval {

// Accuracies of one approach over repeated runs; the summary columns use the
// population standard deviation (the small-n ± convention).
struct RunReport {
    std::string approach;
    std::vector<double> dev_accuracies;
    std::vector<double> test_accuracies;
};

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;
};

Summary summarize(const std::vector<double>& values);

// Fraction of exact label matches; every gold id must be predicted.
double accuracy(const std::map<std::string, int>& predictions,
                const std::vector<corpus::TaskInstance>& gold);

// Fair seeded coin per instance.
std::map<std::string, int> random_baseline(const std::vector<corpus::TaskInstance>& instances,
                                           std::uint64_t seed);

// Aligned plain-text table, one row per approach (sorted by name) with mean
// and +/- std per split, preceded by the fixed human-reference rows.
std::string format_report(const std::vector<RunReport>& reports);

// Machine-readable twin of format_report.
std::string report_json(const std::vector<RunReport>& reports);

// Predictions CSV: instanceId,label
void save_predictions_csv(const std::map<std::string, int>& predictions, const std::string& path);
std::map<std::string, int> load_predictions_csv(const std::string& path);

// Run-report JSON files written by the training commands and consumed by
// the report command.
void save_run_report(const RunReport& report, const std::string& path);
RunReport load_run_report(const std::string& path);

} // namespace arct::eval
