#pragma once

#include <map>
#include <string>
#include <vector>

namespace arct::corpus {

struct Debate {
    std::string debate_id;
    std::string title;
    std::string description;
    int year = 0;
};

// One task instance: reason R, claim C and two candidate warrants, the
// label naming the slot that holds the correct warrant. Title/description
// of the source debate ride along as context.
struct TaskInstance {
    std::string instance_id;
    std::string warrant0;
    std::string warrant1;
    int label = 0; // 0 or 1
    std::string reason;
    std::string claim;
    std::string debate_title;
    std::string debate_info;
    std::string debate_id;
};

struct DataSplit {
    std::vector<TaskInstance> train;
    std::vector<TaskInstance> dev;
    std::vector<TaskInstance> test;
};

enum class InstanceFormat { Tsv, Jsonl };

// Loads instances from a TSV (header row, columns: id warrant0 warrant1
// label reason claim debateTitle debateInfo) or a JSONL file with the same
// field names. Errors name the offending row and column. Duplicate ids are
// rejected.
std::vector<TaskInstance> load_instances(const std::string& path, InstanceFormat format);

void save_instances(const std::vector<TaskInstance>& instances, const std::string& path,
                    InstanceFormat format);

// Debate TSV: debateId  year  title  description (header row).
std::map<std::string, Debate> load_debates(const std::string& path);

void save_debates(const std::vector<Debate>& debates, const std::string& path);

// Year-based split: <= 2015 train, 2016 dev, >= 2017 test. Every instance's
// debate_id must resolve in `debates`.
DataSplit split_by_year(const std::vector<TaskInstance>& instances,
                        const std::map<std::string, Debate>& debates);

// Invariant violations as data; empty means the instance is well-formed.
std::vector<std::string> validate_instance(const TaskInstance& inst);

std::vector<std::string> validate_debate(const Debate& debate);

} // namespace arct::corpus
