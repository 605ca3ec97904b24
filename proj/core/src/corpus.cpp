#include "arct/corpus.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "arct/error.hpp"
#include "arct/text.hpp"

namespace arct::corpus {

namespace {

using nlohmann::json;

const std::vector<std::string> kInstanceColumns = {
    "id", "warrant0", "warrant1", "label", "reason", "claim", "debateTitle", "debateInfo"};

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file: " + path);
    return in;
}

int parse_label(const std::string& raw, size_t row, const std::string& path) {
    if (raw == "0") return 0;
    if (raw == "1") return 1;
    throw Error(path + ": row " + std::to_string(row) + ", column 'label': expected 0 or 1, got '" +
                raw + "'");
}

void check_no_tabs(const TaskInstance& inst) {
    for (const std::string* f : {&inst.instance_id, &inst.warrant0, &inst.warrant1, &inst.reason,
                                 &inst.claim, &inst.debate_title, &inst.debate_info}) {
        if (f->find('\t') != std::string::npos || f->find('\n') != std::string::npos)
            throw Error("instance '" + inst.instance_id +
                        "' contains a tab or newline; use the JSONL format for such data");
    }
}

std::vector<TaskInstance> load_instances_tsv(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw Error(path + ": missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = text::split(line, '\t');
    if (header != kInstanceColumns)
        throw Error(path + ": unexpected header, want: " + text::join(kInstanceColumns, "\t"));

    std::vector<TaskInstance> out;
    std::set<std::string> seen;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cols = text::split(line, '\t');
        if (cols.size() != kInstanceColumns.size())
            throw Error(path + ": row " + std::to_string(row) + ": expected " +
                        std::to_string(kInstanceColumns.size()) + " columns, got " +
                        std::to_string(cols.size()));
        TaskInstance inst;
        inst.instance_id = cols[0];
        inst.warrant0 = cols[1];
        inst.warrant1 = cols[2];
        inst.label = parse_label(cols[3], row, path);
        inst.reason = cols[4];
        inst.claim = cols[5];
        inst.debate_title = cols[6];
        inst.debate_info = cols[7];
        if (!seen.insert(inst.instance_id).second)
            throw Error(path + ": row " + std::to_string(row) + ": duplicate instance id '" +
                        inst.instance_id + "'");
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<TaskInstance> load_instances_jsonl(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<TaskInstance> out;
    std::set<std::string> seen;
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
        TaskInstance inst;
        try {
            inst.instance_id = obj.at("id").get<std::string>();
            inst.warrant0 = obj.at("warrant0").get<std::string>();
            inst.warrant1 = obj.at("warrant1").get<std::string>();
            inst.reason = obj.at("reason").get<std::string>();
            inst.claim = obj.at("claim").get<std::string>();
            inst.debate_title = obj.at("debateTitle").get<std::string>();
            inst.debate_info = obj.at("debateInfo").get<std::string>();
            const auto& lab = obj.at("label");
            if (lab.is_number_integer()) {
                const int v = lab.get<int>();
                if (v != 0 && v != 1)
                    throw Error(path + ": row " + std::to_string(row) +
                                ", column 'label': expected 0 or 1");
                inst.label = v;
            } else {
                inst.label = parse_label(lab.get<std::string>(), row, path);
            }
        } catch (const json::exception& e) {
            throw Error(path + ": row " + std::to_string(row) + ": " + e.what());
        }
        if (obj.contains("debateId")) inst.debate_id = obj["debateId"].get<std::string>();
        if (!seen.insert(inst.instance_id).second)
            throw Error(path + ": row " + std::to_string(row) + ": duplicate instance id '" +
                        inst.instance_id + "'");
        out.push_back(std::move(inst));
    }
    return out;
}

} // namespace

std::vector<TaskInstance> load_instances(const std::string& path, InstanceFormat format) {
    return format == InstanceFormat::Tsv ? load_instances_tsv(path) : load_instances_jsonl(path);
}

void save_instances(const std::vector<TaskInstance>& instances, const std::string& path,
                    InstanceFormat format) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    if (format == InstanceFormat::Tsv) {
        out << text::join(kInstanceColumns, "\t") << "\n";
        for (const auto& inst : instances) {
            check_no_tabs(inst);
            out << inst.instance_id << '\t' << inst.warrant0 << '\t' << inst.warrant1 << '\t'
                << inst.label << '\t' << inst.reason << '\t' << inst.claim << '\t'
                << inst.debate_title << '\t' << inst.debate_info << "\n";
        }
    } else {
        for (const auto& inst : instances) {
            json obj = {{"id", inst.instance_id},       {"warrant0", inst.warrant0},
                        {"warrant1", inst.warrant1},    {"label", inst.label},
                        {"reason", inst.reason},        {"claim", inst.claim},
                        {"debateTitle", inst.debate_title}, {"debateInfo", inst.debate_info}};
            if (!inst.debate_id.empty()) obj["debateId"] = inst.debate_id;
            out << obj.dump() << "\n";
        }
    }
    if (!out) throw Error("write failed: " + path);
}

std::map<std::string, Debate> load_debates(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    if (!std::getline(in, line)) throw Error(path + ": missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> want = {"debateId", "year", "title", "description"};
    if (text::split(line, '\t') != want)
        throw Error(path + ": unexpected header, want: " + text::join(want, "\t"));

    std::map<std::string, Debate> out;
    size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cols = text::split(line, '\t');
        if (cols.size() != 4)
            throw Error(path + ": row " + std::to_string(row) + ": expected 4 columns, got " +
                        std::to_string(cols.size()));
        Debate d;
        d.debate_id = cols[0];
        try {
            d.year = std::stoi(cols[1]);
        } catch (const std::exception&) {
            throw Error(path + ": row " + std::to_string(row) + ", column 'year': not an integer");
        }
        d.title = cols[2];
        d.description = cols[3];
        const auto violations = validate_debate(d);
        if (!violations.empty())
            throw Error(path + ": row " + std::to_string(row) + ": " + violations.front());
        if (!out.emplace(d.debate_id, d).second)
            throw Error(path + ": row " + std::to_string(row) + ": duplicate debate id '" +
                        d.debate_id + "'");
    }
    return out;
}

void save_debates(const std::vector<Debate>& debates, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write file: " + path);
    out << "debateId\tyear\ttitle\tdescription\n";
    for (const auto& d : debates)
        out << d.debate_id << '\t' << d.year << '\t' << d.title << '\t' << d.description << "\n";
    if (!out) throw Error("write failed: " + path);
}

DataSplit split_by_year(const std::vector<TaskInstance>& instances,
                        const std::map<std::string, Debate>& debates) {
    DataSplit split;
    for (const auto& inst : instances) {
        const auto it = debates.find(inst.debate_id);
        if (it == debates.end())
            throw Error("instance '" + inst.instance_id + "': unresolved debate id '" +
                        inst.debate_id + "'");
        const int year = it->second.year;
        if (year <= 2015)
            split.train.push_back(inst);
        else if (year == 2016)
            split.dev.push_back(inst);
        else
            split.test.push_back(inst); // 2017 and anything newer
    }
    return split;
}

std::vector<std::string> validate_instance(const TaskInstance& inst) {
    std::vector<std::string> v;
    if (inst.instance_id.empty()) v.push_back("empty field: id");
    if (inst.warrant0.empty()) v.push_back("empty field: warrant0");
    if (inst.warrant1.empty()) v.push_back("empty field: warrant1");
    if (inst.reason.empty()) v.push_back("empty field: reason");
    if (inst.claim.empty()) v.push_back("empty field: claim");
    if (!inst.warrant0.empty() && inst.warrant0 == inst.warrant1)
        v.push_back("duplicate warrants");
    if (inst.label != 0 && inst.label != 1) v.push_back("label out of range");
    return v;
}

std::vector<std::string> validate_debate(const Debate& debate) {
    std::vector<std::string> v;
    if (debate.debate_id.empty()) v.push_back("empty field: debateId");
    if (debate.title.empty()) v.push_back("empty field: title");
    if (debate.year < 1990 || debate.year > 2100) v.push_back("year out of range [1990, 2100]");
    return v;
}

} // namespace arct::corpus
