#include <cstdlib>
#include <fstream>
#include <string>

#include "arct/corpus.hpp"
#include "arct/crowd.hpp"
#include "arct/pipeline.hpp"
#include "doctest.h"
#include "pipeline_fixture.hpp"
#include "support.hpp"

using namespace arct;
using testsupport::TempDir;
using testsupport::read_file;

namespace {

int run_cli(const std::string& args, const std::string& capture = "") {
    std::string cmd = std::string(ARCT_CLI_PATH) + " " + args;
    if (!capture.empty()) cmd += " > " + capture + " 2>&1";
    else cmd += " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_instances(const std::string& path, int n, int year_mix = 0) {
    std::ofstream out(path);
    out << "id\twarrant0\twarrant1\tlabel\treason\tclaim\tdebateTitle\tdebateInfo\n";
    for (int i = 0; i < n; ++i) {
        const char* nouns[] = {"cats", "dogs", "owls", "bees", "ants"};
        const std::string noun = nouns[i % 5];
        const int label = i % 2;
        const std::string good = noun + " help people " + std::to_string(i);
        const std::string bad = noun + " harm people " + std::to_string(i);
        out << "i" << i << '\t' << (label == 0 ? good : bad) << '\t'
            << (label == 0 ? bad : good) << '\t' << label << '\t' << "reason about " << noun
            << '\t' << "claim about " << noun << '\t' << "title" << '\t' << "info\n";
    }
    (void)year_mix;
}

} // namespace

TEST_CASE("cli: unknown subcommand exits 2, help exits 0") {
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("aggregate") == 2); // missing required flags
}

TEST_CASE("cli: evaluate prints an accuracy line and exits 0") {
    TempDir dir;
    write_instances(dir.file("gold.tsv"), 4);
    {
        std::ofstream out(dir.file("pred.csv"));
        out << "instanceId,label\ni0,0\ni1,1\ni2,1\ni3,1\n";
    }
    const auto capture = dir.file("out.txt");
    CHECK(run_cli("evaluate --gold " + dir.file("gold.tsv") + " --pred " + dir.file("pred.csv"),
                  capture) == 0);
    CHECK(read_file(capture).rfind("accuracy\t0.75", 0) == 0);
}

TEST_CASE("cli: evaluate --random requires a seed and is reproducible") {
    TempDir dir;
    write_instances(dir.file("gold.tsv"), 50);
    CHECK(run_cli("evaluate --gold " + dir.file("gold.tsv") + " --random") == 1);
    CHECK(run_cli("evaluate --gold " + dir.file("gold.tsv") + " --random --seed 5 --out " +
                  dir.file("p1.csv")) == 0);
    CHECK(run_cli("evaluate --gold " + dir.file("gold.tsv") + " --random --seed 5 --out " +
                  dir.file("p2.csv")) == 0);
    CHECK(read_file(dir.file("p1.csv")) == read_file(dir.file("p2.csv")));
}

TEST_CASE("cli: aggregate writes the prediction TSV deterministically") {
    TempDir dir;
    crowd::save_responses(testsupport::simulate_crowd(20, 5, 0.8, 3), dir.file("r.jsonl"));
    const std::string base = "aggregate --responses " + dir.file("r.jsonl") +
                             " --em-iterations 20 --restarts 3 --seed 11 --out ";
    CHECK(run_cli(base + dir.file("a1.tsv")) == 0);
    CHECK(run_cli(base + dir.file("a2.tsv")) == 0);
    const auto a = read_file(dir.file("a1.tsv"));
    CHECK(a == read_file(dir.file("a2.tsv")));
    CHECK(a.rfind("itemId\tlabel\tconfidence\n", 0) == 0);

    CHECK(run_cli("aggregate --method majority --responses " + dir.file("r.jsonl") +
                  " --seed 1 --out " + dir.file("maj.tsv")) == 0);
    CHECK(read_file(dir.file("maj.tsv")).rfind("itemId\tlabel\tconfidence\n", 0) == 0);
}

TEST_CASE("cli: agreement metrics print metric lines") {
    TempDir dir;
    crowd::save_responses(testsupport::simulate_crowd(10, 4, 0.9, 5), dir.file("r.jsonl"));
    const auto capture = dir.file("alpha.txt");
    CHECK(run_cli("agreement --metric alpha-nominal --responses " + dir.file("r.jsonl"),
                  capture) == 0);
    CHECK(read_file(capture).rfind("krippendorff_alpha_nominal\t", 0) == 0);

    // kappa from two aggregate outputs.
    CHECK(run_cli("aggregate --responses " + dir.file("r.jsonl") +
                  " --em-iterations 10 --restarts 2 --seed 1 --out " + dir.file("a.tsv")) == 0);
    const auto kcap = dir.file("kappa.txt");
    CHECK(run_cli("agreement --metric kappa --pred-a " + dir.file("a.tsv") + " --pred-b " +
                  dir.file("a.tsv"),
                  kcap) == 0);
    CHECK(read_file(kcap).rfind("cohen_kappa\t1", 0) == 0);

    {
        std::ofstream out(dir.file("spans.jsonl"));
        out << R"({"docId":"d","length":20,"annotator":"a","spans":[[0,5]]})" << "\n";
        out << R"({"docId":"d","length":20,"annotator":"b","spans":[[0,5]]})" << "\n";
    }
    const auto ucap = dir.file("alpha_u.txt");
    CHECK(run_cli("agreement --metric alpha-unitized --spans " + dir.file("spans.jsonl"), ucap) ==
          0);
    CHECK(read_file(ucap).rfind("krippendorff_alpha_unitized\t1", 0) == 0);
}

TEST_CASE("cli: reliability produces the full grid") {
    TempDir dir;
    crowd::save_responses(testsupport::simulate_crowd(12, 6, 0.85, 7), dir.file("r.jsonl"));
    CHECK(run_cli("reliability --responses " + dir.file("r.jsonl") +
                  " --k 1-3 --fractions 0.9,1.0 --repeats 2 --em-iterations 10 --restarts 2 "
                  "--seed 7 --out " +
                  dir.file("curve.csv") + " --svg " + dir.file("curve.svg")) == 0);
    const auto csv = read_file(dir.file("curve.csv"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 3 * 2);
    CHECK(read_file(dir.file("curve.svg")).find("<svg") != std::string::npos);

    // Missing --seed is a usage error.
    CHECK(run_cli("reliability --responses " + dir.file("r.jsonl") + " --out " +
                  dir.file("x.csv")) == 2);
}

TEST_CASE("cli: reliability 1-9 x 4 fractions yields a 36-row grid") {
    TempDir dir;
    crowd::save_responses(testsupport::simulate_crowd(8, 18, 0.95, 21), dir.file("r.jsonl"));
    CHECK(run_cli("reliability --responses " + dir.file("r.jsonl") +
                  " --k 1-9 --fractions 0.85,0.90,0.95,1.0 --repeats 2 --em-iterations 8 "
                  "--restarts 2 --seed 7 --out " +
                  dir.file("grid.csv")) == 0);
    const auto csv = read_file(dir.file("grid.csv"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 9 * 4);
}

TEST_CASE("cli: pipeline init, eight runs, assemble") {
    TempDir dir;
    const auto fx = testsupport::make_pipeline_fixture(12);
    pipeline::save_records(fx.seeds, dir.file("seeds.jsonl"));
    {
        std::vector<corpus::Debate> debates = {{"d1", "Debate title", "Debate info", 2015}};
        corpus::save_debates(debates, dir.file("debates.tsv"));
    }
    const std::string state = dir.file("state");
    CHECK(run_cli("pipeline --mode init --records " + dir.file("seeds.jsonl") + " --state " +
                  state + " --seed 5") == 0);
    CHECK(std::ifstream(state + "/labels.json").good());

    for (int stage = 1; stage <= 8; ++stage) {
        const auto it = fx.responses.find(stage);
        std::string responses_flag;
        if (it != fx.responses.end()) {
            const auto path = dir.file("resp" + std::to_string(stage) + ".jsonl");
            crowd::save_responses(it->second, path);
            responses_flag = " --responses " + path;
        }
        CHECK(run_cli("pipeline --mode run --state " + state + " --stage " +
                      std::to_string(stage) + responses_flag +
                      " --em-iterations 15 --restarts 2 --seed 5") == 0);
    }
    CHECK(std::ifstream(state + "/stage-8.jsonl").good());
    CHECK(std::ifstream(state + "/stage-8.report.json").good());
    const auto disputed = pipeline::load_records(state + "/disputed.jsonl");
    CHECK(disputed.size() == fx.expected_disputed_ids.size());

    CHECK(run_cli("pipeline --mode assemble --state " + state + " --debates " +
                  dir.file("debates.tsv") + " --seed 5 --out " + dir.file("instances.tsv")) == 0);
    const auto instances =
        corpus::load_instances(dir.file("instances.tsv"), corpus::InstanceFormat::Tsv);
    CHECK(instances.size() == fx.expected_final_ids.size());

    // Expert resolution: clear the disputed flag and assemble again.
    auto resolved = disputed;
    for (auto& rec : resolved) rec.disputed = false;
    pipeline::save_records(resolved, dir.file("resolved.jsonl"));
    CHECK(run_cli("pipeline --mode assemble --state " + state + " --debates " +
                  dir.file("debates.tsv") + " --resolved " + dir.file("resolved.jsonl") +
                  " --seed 5 --out " + dir.file("instances2.tsv")) == 0);
    CHECK(corpus::load_instances(dir.file("instances2.tsv"), corpus::InstanceFormat::Tsv).size() ==
          instances.size() + resolved.size());
}

TEST_CASE("cli: pipeline distractors writes assignments") {
    TempDir dir;
    std::vector<pipeline::PipelineRecord> records;
    for (int i = 0; i < 3; ++i) {
        pipeline::PipelineRecord rec;
        rec.record_id = "r" + std::to_string(i);
        rec.debate_id = "d1";
        rec.stage = 5;
        rec.stance_label = "claim";
        rec.reason_spans = {{0, 2}};
        rec.claim = "c";
        rec.opposing_claim = "oc";
        rec.gist = i == 0 ? "alpha alpha" : (i == 1 ? "alpha beta" : "gamma gamma");
        rec.alternative_warrant = "aw";
        records.push_back(rec);
    }
    const std::string state = dir.file("state");
    std::filesystem::create_directories(state);
    pipeline::save_records(records, state + "/stage-5.jsonl");
    {
        std::ofstream out(dir.file("emb.txt"));
        out << "alpha 1 0\nbeta 0.7 0.7\ngamma 0 1\n";
    }
    CHECK(run_cli("pipeline --mode distractors --state " + state + " --embeddings " +
                  dir.file("emb.txt") + " --seed 1 --out " + dir.file("distractors.tsv")) == 0);
    const auto tsv = read_file(dir.file("distractors.tsv"));
    CHECK(tsv.rfind("recordId\tdistractorRecordId\n", 0) == 0);
    CHECK(tsv.find("r0\tr2") != std::string::npos); // most dissimilar gist
}

TEST_CASE("cli: train-lm then lm-eval round trip") {
    TempDir dir;
    {
        std::ofstream out(dir.file("corpus.txt"));
        for (int i = 0; i < 30; ++i)
            out << "cats help people and dogs help people\n"
                << "strange tokens disturb fluent text\n";
    }
    CHECK(run_cli("train-lm --corpus " + dir.file("corpus.txt") + " --order 3 --max-vocab 100 "
                  "--out " +
                  dir.file("model.lm")) == 0);
    write_instances(dir.file("test.tsv"), 6);
    const auto capture = dir.file("lm_eval.txt");
    CHECK(run_cli("lm-eval --model " + dir.file("model.lm") + " --instances " +
                  dir.file("test.tsv") + " --out " + dir.file("lm_pred.csv"),
                  capture) == 0);
    CHECK(read_file(capture).rfind("accuracy\t", 0) == 0);
    CHECK(read_file(dir.file("lm_pred.csv")).rfind("instanceId,label\n", 0) == 0);
}

TEST_CASE("cli: train-neural writes params, log and report; report renders them") {
    TempDir dir;
    write_instances(dir.file("train.tsv"), 8);
    write_instances(dir.file("dev.tsv"), 4);
    write_instances(dir.file("test.tsv"), 4);
    CHECK(run_cli("train-neural --train " + dir.file("train.tsv") + " --dev " +
                  dir.file("dev.tsv") + " --test " + dir.file("test.tsv") +
                  " --variant intra-warrant --with-context --runs 2 --epochs 3 --patience 3"
                  " --dropout 0.1 --embed-dim 8 --hidden-dim 4 --batch 4 --seed 9 --out " +
                  dir.file("params.bin") + " --log " + dir.file("log.csv") + " --report " +
                  dir.file("run.json")) == 0);
    CHECK(read_file(dir.file("log.csv")).rfind("epoch,train_loss,dev_acc\n", 0) == 0);
    CHECK(read_file(dir.file("run.json")).find("intra-warrant attention w/ context") !=
          std::string::npos);

    const auto capture = dir.file("report.txt");
    CHECK(run_cli("report --runs " + dir.file("run.json") + " --json " + dir.file("report.json"),
                  capture) == 0);
    const auto table = read_file(capture);
    CHECK(table.find("Human average") != std::string::npos);
    CHECK(table.find("intra-warrant attention w/ context") != std::string::npos);
    CHECK(read_file(dir.file("report.json")).find("population") != std::string::npos);
}

TEST_CASE("cli: config file values are overridden by explicit flags") {
    TempDir dir;
    write_instances(dir.file("gold.tsv"), 10);
    {
        std::ofstream out(dir.file("cli.conf"));
        out << "[evaluate]\n"
            << "gold = " << dir.file("gold.tsv") << "\n"
            << "random = true\n"
            << "seed = 3\n"
            << "out = " << dir.file("from_config.csv") << "\n";
    }
    CHECK(run_cli("--config " + dir.file("cli.conf") + " evaluate") == 0);
    CHECK(read_file(dir.file("from_config.csv")).rfind("instanceId,label\n", 0) == 0);

    // The explicit flag wins over the config value.
    CHECK(run_cli("--config " + dir.file("cli.conf") + " evaluate --out " +
                  dir.file("explicit.csv")) == 0);
    CHECK(std::ifstream(dir.file("explicit.csv")).good());
}
