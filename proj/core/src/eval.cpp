#include "arct/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "arct/error.hpp"
#include "arct/random.hpp"
#include "arct/text.hpp"

namespace arct::eval {

namespace {

using nlohmann::json;

// Human performance on the task, kept as reference constants (test split
// only).
struct Reference {
    const char* approach;
    double test_mean;
    double test_std;
};
constexpr Reference kHumanReference[] = {
    {"Human average", 0.798, 0.162},
    {"Human w/ training in reasoning", 0.909, 0.114},
};

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

} // namespace

Summary summarize(const std::vector<double>& values) {
    Summary s;
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) acc += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(acc / static_cast<double>(values.size()));
    return s;
}

double accuracy(const std::map<std::string, int>& predictions,
                const std::vector<corpus::TaskInstance>& gold) {
    if (gold.empty()) throw Error("accuracy: empty gold set");
    size_t correct = 0;
    for (const auto& inst : gold) {
        const auto it = predictions.find(inst.instance_id);
        if (it == predictions.end())
            throw Error("accuracy: missing prediction for instance '" + inst.instance_id + "'");
        if (it->second == inst.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

std::map<std::string, int> random_baseline(const std::vector<corpus::TaskInstance>& instances,
                                           std::uint64_t seed) {
    Rng rng(seed);
    std::map<std::string, int> out;
    for (const auto& inst : instances) out[inst.instance_id] = rng.coin() ? 1 : 0;
    return out;
}

std::string format_report(const std::vector<RunReport>& reports) {
    std::vector<RunReport> sorted = reports;
    std::sort(sorted.begin(), sorted.end(),
              [](const RunReport& a, const RunReport& b) { return a.approach < b.approach; });

    size_t name_width = std::string("Approach").size();
    for (const auto& ref : kHumanReference)
        name_width = std::max(name_width, std::string(ref.approach).size() + 12);
    for (const auto& r : sorted) name_width = std::max(name_width, r.approach.size());

    std::ostringstream out;
    auto row = [&](const std::string& name, const std::string& dev, const std::string& dev_std,
                   const std::string& test, const std::string& test_std) {
        out << name;
        for (size_t i = name.size(); i < name_width + 2; ++i) out << ' ';
        auto cell = [&](const std::string& v) {
            out << v;
            for (size_t i = v.size(); i < 8; ++i) out << ' ';
        };
        cell(dev);
        cell(dev_std);
        cell(test);
        cell(test_std);
        out << "\n";
    };
    row("Approach", "Dev", "(+/-)", "Test", "(+/-)");
    for (const auto& ref : kHumanReference)
        row(std::string(ref.approach) + " [reference]", "-", "-", fmt3(ref.test_mean),
            fmt3(ref.test_std));
    for (const auto& r : sorted) {
        const Summary dev = summarize(r.dev_accuracies);
        const Summary test = summarize(r.test_accuracies);
        row(r.approach, r.dev_accuracies.empty() ? "-" : fmt3(dev.mean),
            r.dev_accuracies.empty() ? "-" : fmt3(dev.stddev),
            r.test_accuracies.empty() ? "-" : fmt3(test.mean),
            r.test_accuracies.empty() ? "-" : fmt3(test.stddev));
    }
    out << "\n(+/-) columns are population standard deviations over runs.\n";
    return out.str();
}

std::string report_json(const std::vector<RunReport>& reports) {
    std::vector<RunReport> sorted = reports;
    std::sort(sorted.begin(), sorted.end(),
              [](const RunReport& a, const RunReport& b) { return a.approach < b.approach; });
    json doc;
    doc["reference"] = json::array();
    for (const auto& ref : kHumanReference)
        doc["reference"].push_back(
            {{"approach", ref.approach}, {"testMean", ref.test_mean}, {"testStd", ref.test_std}});
    doc["approaches"] = json::array();
    for (const auto& r : sorted) {
        const Summary dev = summarize(r.dev_accuracies);
        const Summary test = summarize(r.test_accuracies);
        doc["approaches"].push_back({{"approach", r.approach},
                                     {"devMean", dev.mean},
                                     {"devStd", dev.stddev},
                                     {"devRuns", r.dev_accuracies},
                                     {"testMean", test.mean},
                                     {"testStd", test.stddev},
                                     {"testRuns", r.test_accuracies}});
    }
    doc["stdConvention"] = "population";
    return doc.dump(2);
}

void save_predictions_csv(const std::map<std::string, int>& predictions,
                          const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "instanceId,label\n";
    for (const auto& [id, label] : predictions) out << id << ',' << label << "\n";
    if (!out) throw Error("write failed: " + path);
}

std::map<std::string, int> load_predictions_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line) || text::trim(line) != "instanceId,label")
        throw Error(path + ": expected header 'instanceId,label'");
    std::map<std::string, int> out;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (text::trim(line).empty()) continue;
        const auto cols = text::split(line, ',');
        if (cols.size() != 2)
            throw Error(path + ": row " + std::to_string(row) + ": expected 2 columns");
        int label = 0;
        if (cols[1] == "0")
            label = 0;
        else if (cols[1] == "1")
            label = 1;
        else
            throw Error(path + ": row " + std::to_string(row) + ": label must be 0 or 1");
        if (!out.emplace(cols[0], label).second)
            throw Error(path + ": row " + std::to_string(row) + ": duplicate instance id");
    }
    return out;
}

void save_run_report(const RunReport& report, const std::string& path) {
    json doc = {{"approach", report.approach},
                {"devAccuracies", report.dev_accuracies},
                {"testAccuracies", report.test_accuracies}};
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << doc.dump(2) << "\n";
}

RunReport load_run_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
    RunReport report;
    report.approach = doc.at("approach").get<std::string>();
    report.dev_accuracies = doc.at("devAccuracies").get<std::vector<double>>();
    if (doc.contains("testAccuracies"))
        report.test_accuracies = doc["testAccuracies"].get<std::vector<double>>();
    for (const auto* accs : {&report.dev_accuracies, &report.test_accuracies})
        for (double v : *accs)
            if (v < 0.0 || v > 1.0)
                throw Error(path + ": accuracy " + std::to_string(v) + " outside [0, 1]");
    return report;
}

} // namespace arct::eval
