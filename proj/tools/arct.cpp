// arct: argument reasoning comprehension toolkit.
//
// One executable, one subcommand per invocation. Exit codes: 0 success,
// 1 data errors, 2 usage errors. Every randomized subcommand requires
// --seed and is byte-reproducible for a given seed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include "CLI11.hpp"

#include "arct/agreement.hpp"
#include "arct/corpus.hpp"
#include "arct/crowd.hpp"
#include "arct/error.hpp"
#include "arct/eval.hpp"
#include "arct/lm.hpp"
#include "arct/neural/train.hpp"
#include "arct/pipeline.hpp"
#include "arct/random.hpp"
#include "arct/reliability.hpp"
#include "arct/text.hpp"

namespace {

namespace fs = std::filesystem;
using namespace arct;

corpus::InstanceFormat format_of(const std::string& name) {
    if (name == "tsv") return corpus::InstanceFormat::Tsv;
    if (name == "jsonl") return corpus::InstanceFormat::Jsonl;
    throw Error("unknown instance format '" + name + "' (tsv or jsonl)");
}

std::vector<int> parse_k_range(const std::string& spec) {
    std::vector<int> out;
    for (const auto& part : text::split(spec, ',')) {
        const auto dash = part.find('-');
        if (dash != std::string::npos && dash > 0) {
            const int lo = std::stoi(part.substr(0, dash));
            const int hi = std::stoi(part.substr(dash + 1));
            if (hi < lo) throw Error("bad k range '" + part + "'");
            for (int k = lo; k <= hi; ++k) out.push_back(k);
        } else {
            out.push_back(std::stoi(part));
        }
    }
    if (out.empty()) throw Error("empty k range");
    return out;
}

std::vector<double> parse_fractions(const std::string& spec) {
    std::vector<double> out;
    for (const auto& part : text::split(spec, ',')) out.push_back(std::stod(part));
    if (out.empty()) throw Error("empty fraction list");
    return out;
}

std::string stage_file(const std::string& state, int stage) {
    return (fs::path(state) / ("stage-" + std::to_string(stage) + ".jsonl")).string();
}

struct AggregateArgs {
    std::string responses, out, labels, method = "mace";
    double keep_fraction = 1.0;
    crowd::AggregationConfig config;
};

void run_aggregate(const AggregateArgs& args) {
    const auto responses = crowd::load_responses(args.responses);
    if (args.method == "majority") {
        const auto result = crowd::majority_vote(responses);
        std::map<std::string, std::map<std::string, int>> votes;
        std::map<std::string, int> totals;
        for (const auto& r : responses) {
            votes[r.item_id][r.label] += 1;
            totals[r.item_id] += 1;
        }
        std::ofstream out(args.out);
        if (!out) throw Error("cannot write file: " + args.out);
        out << "itemId\tlabel\tconfidence\n";
        out.precision(17);
        for (const auto& [item, entry] : result.by_item)
            out << item << '\t' << entry.label << '\t'
                << static_cast<double>(votes[item][entry.label]) /
                       static_cast<double>(totals[item])
                << "\n";
        return;
    }
    if (args.method != "mace") throw Error("unknown aggregation method '" + args.method + "'");
    crowd::AggregationConfig cfg = args.config;
    if (!args.labels.empty()) cfg.label_set = text::split(args.labels, ',');
    const auto model = crowd::mace_fit(responses, cfg);
    const auto predictions = crowd::threshold_predictions(model, args.keep_fraction);
    crowd::save_predictions_tsv(model, predictions, args.out);
}

struct AgreementArgs {
    std::string metric, pred_a, pred_b, responses, spans, out;
};

void run_agreement(const AgreementArgs& args) {
    std::string line;
    if (args.metric == "kappa") {
        if (args.pred_a.empty() || args.pred_b.empty())
            throw Error("kappa needs --pred-a and --pred-b");
        const auto a = crowd::load_predictions_tsv(args.pred_a);
        const auto b = crowd::load_predictions_tsv(args.pred_b);
        agreement::LabelSeriesPair pair;
        for (const auto& [item, entry] : a) {
            const auto it = b.find(item);
            if (it == b.end())
                throw Error("item '" + item + "' present in " + args.pred_a + " but not in " +
                            args.pred_b);
            pair.items.push_back(item);
            pair.labels_a.push_back(entry.first);
            pair.labels_b.push_back(it->second.first);
        }
        for (const auto& [item, entry] : b)
            if (!a.count(item))
                throw Error("item '" + item + "' present in " + args.pred_b + " but not in " +
                            args.pred_a);
        const auto kappa = agreement::cohen_kappa(pair);
        char buf[64];
        if (kappa)
            std::snprintf(buf, sizeof(buf), "%.17g", *kappa);
        line = std::string("cohen_kappa\t") + (kappa ? buf : "undefined");
    } else if (args.metric == "alpha-nominal") {
        if (args.responses.empty()) throw Error("alpha-nominal needs --responses");
        const double alpha =
            agreement::krippendorff_alpha_nominal(crowd::load_responses(args.responses));
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", alpha);
        line = std::string("krippendorff_alpha_nominal\t") + buf;
    } else if (args.metric == "alpha-unitized") {
        if (args.spans.empty()) throw Error("alpha-unitized needs --spans");
        const double alpha =
            agreement::krippendorff_alpha_unitized(agreement::load_continua(args.spans));
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.17g", alpha);
        line = std::string("krippendorff_alpha_unitized\t") + buf;
    } else {
        throw Error("unknown metric '" + args.metric +
                    "' (kappa, alpha-nominal or alpha-unitized)");
    }
    std::cout << line << "\n";
    if (!args.out.empty()) {
        std::ofstream out(args.out);
        if (!out) throw Error("cannot write file: " + args.out);
        out << line << "\n";
    }
}

struct ReliabilityArgs {
    std::string responses, k_spec = "1-9", fractions_spec = "1.0", out, svg;
    int repeats = 20;
    crowd::AggregationConfig config;
};

void run_reliability(const ReliabilityArgs& args) {
    const auto responses = crowd::load_responses(args.responses);
    const auto points =
        reliability::reliability_curve(responses, parse_k_range(args.k_spec),
                                       parse_fractions(args.fractions_spec), args.repeats,
                                       args.config);
    reliability::save_curve_csv(points, args.out);
    if (!args.svg.empty()) reliability::save_curve_svg(points, args.svg);
}

struct PipelineArgs {
    std::string mode = "run", state, records, responses, debates, resolved, embeddings, out;
    std::string format = "tsv";
    int stage = 0;
    pipeline::PipelineConfig config;
};

void run_pipeline(const PipelineArgs& args) {
    if (args.mode == "init") {
        if (args.records.empty() || args.state.empty())
            throw Error("pipeline init needs --records and --state");
        fs::create_directories(args.state);
        const auto records = pipeline::load_records(args.records);
        for (const auto& rec : records) {
            if (rec.stage != 0)
                throw Error("seed record '" + rec.record_id + "' is not at stage 0");
            const auto violations = pipeline::validate_record(rec);
            if (!violations.empty())
                throw Error("seed record '" + rec.record_id + "': " + violations.front());
        }
        pipeline::save_records(records, stage_file(args.state, 0));
        pipeline::write_labels_manifest((fs::path(args.state) / "labels.json").string());
        std::cout << "initialized " << records.size() << " records\n";
        return;
    }
    if (args.mode == "run") {
        if (args.state.empty() || args.stage < 1 || args.stage > 8)
            throw Error("pipeline run needs --state and --stage in 1..8");
        const auto records = pipeline::load_records(stage_file(args.state, args.stage - 1));
        const auto responses =
            args.responses.empty() ? std::vector<crowd::WorkerResponse>{}
                                   : crowd::load_responses(args.responses);
        const auto out = pipeline::run_step(records, args.stage, responses, args.config);
        pipeline::save_records(out.records, stage_file(args.state, args.stage));
        pipeline::save_report(out.report, (fs::path(args.state) /
                                           ("stage-" + std::to_string(args.stage) +
                                            ".report.json"))
                                              .string());
        if (args.stage == 8)
            pipeline::save_records(out.disputed,
                                   (fs::path(args.state) / "disputed.jsonl").string());
        std::cout << "stage " << args.stage << ": " << out.report.input_count << " -> "
                  << out.report.output_count << " (dropped " << out.report.dropped_count
                  << ")\n";
        return;
    }
    if (args.mode == "distractors") {
        if (args.state.empty() || args.embeddings.empty() || args.out.empty())
            throw Error("pipeline distractors needs --state, --embeddings and --out");
        const auto records = pipeline::load_records(stage_file(args.state, 5));
        const auto embed = pipeline::load_word_embeddings(args.embeddings);
        std::map<std::string, std::vector<pipeline::PipelineRecord>> by_debate;
        for (const auto& rec : records) by_debate[rec.debate_id].push_back(rec);
        std::ofstream out(args.out);
        if (!out) throw Error("cannot write file: " + args.out);
        out << "recordId\tdistractorRecordId\n";
        size_t skipped = 0;
        for (const auto& rec : records) {
            std::vector<pipeline::PipelineRecord> pool;
            for (const auto& other : by_debate[rec.debate_id])
                if (other.record_id != rec.record_id) pool.push_back(other);
            if (pool.empty()) {
                ++skipped;
                continue;
            }
            const auto choice = pipeline::sample_distractor(rec, pool, embed);
            out << rec.record_id << '\t' << choice.record.record_id << "\n";
        }
        if (skipped > 0)
            std::cerr << skipped << " record(s) had no same-debate candidates and were skipped\n";
        return;
    }
    if (args.mode == "assemble") {
        if (args.state.empty() || args.debates.empty() || args.out.empty())
            throw Error("pipeline assemble needs --state, --debates and --out");
        auto records = pipeline::load_records(stage_file(args.state, 8));
        if (!args.resolved.empty()) {
            std::set<std::string> ids;
            for (const auto& rec : records) ids.insert(rec.record_id);
            for (const auto& rec : pipeline::load_records(args.resolved)) {
                if (ids.count(rec.record_id))
                    throw Error("resolved record '" + rec.record_id +
                                "' already present at stage 8");
                records.push_back(rec);
            }
        }
        const auto debates = corpus::load_debates(args.debates);
        const auto result =
            pipeline::assemble_instances(records, debates, args.config.seed);
        corpus::save_instances(result.instances, args.out, format_of(args.format));
        std::cout << "assembled " << result.instances.size() << " instances";
        if (!result.excluded.empty())
            std::cout << " (" << result.excluded.size() << " disputed excluded)";
        std::cout << "\n";
        return;
    }
    throw Error("unknown pipeline mode '" + args.mode + "'");
}

struct TrainLmArgs {
    std::string corpus_path, out;
    int order = 4;
    int max_vocab = 100000;
};

void run_train_lm(const TrainLmArgs& args) {
    const auto model = lm::train_kn_file(args.corpus_path, args.order, args.max_vocab);
    model.save(args.out);
    for (const auto& note : model.notes()) std::cerr << "note: " << note << "\n";
}

struct LmEvalArgs {
    std::string model, instances, out, format = "tsv";
    bool with_context = false;
};

void run_lm_eval(const LmEvalArgs& args) {
    const auto model = lm::LanguageModel::load(args.model);
    const auto instances = corpus::load_instances(args.instances, format_of(args.format));
    if (instances.empty()) throw Error("no instances in " + args.instances);
    std::map<std::string, int> predictions;
    for (const auto& inst : instances)
        predictions[inst.instance_id] = lm::lm_choose(model, inst, args.with_context);
    if (!args.out.empty()) eval::save_predictions_csv(predictions, args.out);
    std::printf("accuracy\t%.17g\n", eval::accuracy(predictions, instances));
}

struct TrainNeuralArgs {
    std::string train_path, dev_path, test_path, out, log, report, approach;
    std::string format = "tsv";
    std::string variant = "intra-warrant";
    bool with_context = false;
    neural::TrainConfig config;
};

void run_train_neural(const TrainNeuralArgs& args) {
    corpus::DataSplit split;
    split.train = corpus::load_instances(args.train_path, format_of(args.format));
    split.dev = corpus::load_instances(args.dev_path, format_of(args.format));
    std::vector<corpus::TaskInstance> test;
    if (!args.test_path.empty())
        test = corpus::load_instances(args.test_path, format_of(args.format));

    neural::Variant variant;
    if (args.variant == "intra-warrant")
        variant.intra_warrant = true;
    else if (args.variant == "standard")
        variant.intra_warrant = false;
    else
        throw Error("unknown variant '" + args.variant + "' (standard or intra-warrant)");
    variant.with_context = args.with_context;

    eval::RunReport report;
    report.approach = args.approach.empty() ? variant.name() : args.approach;

    std::optional<neural::TrainResult> best;
    for (int run = 0; run < args.config.runs; ++run) {
        neural::TrainConfig cfg = args.config;
        cfg.seed = mix_seed(args.config.seed, static_cast<std::uint64_t>(run));
        auto result = neural::train(split, cfg, variant);
        if (result.diverged) throw Error("training diverged (non-finite loss)");
        report.dev_accuracies.push_back(result.best_dev_accuracy);
        if (!test.empty()) {
            const auto labels = neural::predict(result.params, test);
            std::map<std::string, int> predictions;
            for (size_t i = 0; i < test.size(); ++i)
                predictions[test[i].instance_id] = labels[i];
            report.test_accuracies.push_back(eval::accuracy(predictions, test));
        }
        std::printf("run %d: dev %.3f (epoch %d)\n", run + 1, result.best_dev_accuracy,
                    result.best_epoch);
        if (!best || result.best_dev_accuracy > best->best_dev_accuracy)
            best = std::move(result);
    }
    neural::save_params(best->params, args.out);
    if (!args.log.empty()) neural::save_history_csv(best->history, args.log);
    if (!args.report.empty()) eval::save_run_report(report, args.report);
    const auto dev = eval::summarize(report.dev_accuracies);
    std::printf("dev mean %.3f +/- %.3f over %d run(s)\n", dev.mean, dev.stddev,
                args.config.runs);
}

struct EvaluateArgs {
    std::string gold, pred, out, format = "tsv";
    bool random = false;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void run_evaluate(const EvaluateArgs& args) {
    const auto gold = corpus::load_instances(args.gold, format_of(args.format));
    if (gold.empty()) throw Error("no instances in " + args.gold);
    std::map<std::string, int> predictions;
    if (args.random) {
        if (!args.seed_set) throw Error("--random requires --seed");
        predictions = eval::random_baseline(gold, args.seed);
    } else {
        if (args.pred.empty()) throw Error("evaluate needs --pred or --random");
        predictions = eval::load_predictions_csv(args.pred);
    }
    if (!args.out.empty()) eval::save_predictions_csv(predictions, args.out);
    std::printf("accuracy\t%.17g\n", eval::accuracy(predictions, gold));
}

struct ReportArgs {
    std::vector<std::string> runs;
    std::string out, json_out;
};

void run_report(const ReportArgs& args) {
    std::vector<eval::RunReport> reports;
    for (const auto& path : args.runs) reports.push_back(eval::load_run_report(path));
    const auto table = eval::format_report(reports);
    std::cout << table;
    if (!args.out.empty()) {
        std::ofstream out(args.out);
        if (!out) throw Error("cannot write file: " + args.out);
        out << table;
    }
    if (!args.json_out.empty()) {
        std::ofstream out(args.json_out);
        if (!out) throw Error("cannot write file: " + args.json_out);
        out << eval::report_json(reports) << "\n";
    }
}

void add_aggregation_flags(CLI::App* cmd, crowd::AggregationConfig& cfg, bool require_seed) {
    auto* seed = cmd->add_option("--seed", cfg.seed, "random seed");
    if (require_seed) seed->required();
    cmd->add_option("--em-iterations", cfg.em_iterations, "EM iterations per restart");
    cmd->add_option("--restarts", cfg.restarts, "EM restarts");
    cmd->add_option("--smoothing", cfg.smoothing_delta, "additive smoothing delta");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"argument reasoning comprehension toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value config file; explicit flags win");
    app.config_formatter(std::make_shared<CLI::ConfigINI>());

    AggregateArgs aggregate_args;
    auto* aggregate = app.add_subcommand("aggregate", "estimate labels from crowd responses");
    aggregate->add_option("--responses", aggregate_args.responses, "response JSONL")->required();
    aggregate->add_option("--out", aggregate_args.out, "output TSV")->required();
    aggregate->add_option("--method", aggregate_args.method, "mace or majority");
    aggregate->add_option("--keep-fraction", aggregate_args.keep_fraction,
                          "keep the most confident fraction (0,1]");
    aggregate->add_option("--labels", aggregate_args.labels, "comma-separated label set");
    add_aggregation_flags(aggregate, aggregate_args.config, true);
    aggregate->callback([&]() { run_aggregate(aggregate_args); });

    AgreementArgs agreement_args;
    auto* agreement_cmd = app.add_subcommand("agreement", "inter-annotator agreement metrics");
    agreement_cmd->add_option("--metric", agreement_args.metric,
                              "kappa, alpha-nominal or alpha-unitized")
        ->required();
    agreement_cmd->add_option("--pred-a", agreement_args.pred_a, "first prediction TSV");
    agreement_cmd->add_option("--pred-b", agreement_args.pred_b, "second prediction TSV");
    agreement_cmd->add_option("--responses", agreement_args.responses, "response JSONL");
    agreement_cmd->add_option("--spans", agreement_args.spans, "span JSONL");
    agreement_cmd->add_option("--out", agreement_args.out, "also write the metric line here");
    agreement_cmd->callback([&]() { run_agreement(agreement_args); });

    ReliabilityArgs reliability_args;
    auto* reliability_cmd =
        app.add_subcommand("reliability", "split-crowd agreement curves");
    reliability_cmd->add_option("--responses", reliability_args.responses, "response JSONL")
        ->required();
    reliability_cmd->add_option("--k", reliability_args.k_spec, "crowd sizes, e.g. 1-9 or 1,3,5");
    reliability_cmd->add_option("--fractions", reliability_args.fractions_spec,
                                "keep fractions, e.g. 0.85,0.90,0.95,1.0");
    reliability_cmd->add_option("--repeats", reliability_args.repeats, "repeats per grid point");
    reliability_cmd->add_option("--out", reliability_args.out, "output CSV")->required();
    reliability_cmd->add_option("--svg", reliability_args.svg, "optional SVG chart");
    add_aggregation_flags(reliability_cmd, reliability_args.config, true);
    reliability_cmd->callback([&]() { run_reliability(reliability_args); });

    PipelineArgs pipeline_args;
    auto* pipeline_cmd = app.add_subcommand("pipeline", "eight-step reconstruction workflow");
    pipeline_cmd->add_option("--mode", pipeline_args.mode, "init, run, distractors or assemble");
    pipeline_cmd->add_option("--state", pipeline_args.state, "pipeline state directory");
    pipeline_cmd->add_option("--stage", pipeline_args.stage, "stage to run (1..8)");
    pipeline_cmd->add_option("--records", pipeline_args.records, "seed records JSONL (init)");
    pipeline_cmd->add_option("--responses", pipeline_args.responses, "worker responses JSONL");
    pipeline_cmd->add_option("--debates", pipeline_args.debates, "debate TSV (assemble)");
    pipeline_cmd->add_option("--resolved", pipeline_args.resolved,
                             "expert-resolved records JSONL (assemble)");
    pipeline_cmd->add_option("--embeddings", pipeline_args.embeddings,
                             "word embedding file (distractors)");
    pipeline_cmd->add_option("--out", pipeline_args.out, "output path");
    pipeline_cmd->add_option("--format", pipeline_args.format, "tsv or jsonl (assemble)");
    pipeline_cmd->add_option("--logic-threshold", pipeline_args.config.logic_threshold,
                             "stage-7 logic-score threshold (inclusive)");
    pipeline_cmd
        ->add_option("--seed", pipeline_args.config.seed, "random seed (aggregation, coin)")
        ->required();
    pipeline_cmd->add_option("--em-iterations", pipeline_args.config.aggregation.em_iterations,
                             "EM iterations per restart");
    pipeline_cmd->add_option("--restarts", pipeline_args.config.aggregation.restarts,
                             "EM restarts");
    pipeline_cmd->callback([&]() {
        pipeline_args.config.aggregation.seed = pipeline_args.config.seed;
        run_pipeline(pipeline_args);
    });

    TrainLmArgs train_lm_args;
    auto* train_lm = app.add_subcommand("train-lm", "train the Kneser-Ney language model");
    train_lm->add_option("--corpus", train_lm_args.corpus_path, "plain-text corpus")->required();
    train_lm->add_option("--order", train_lm_args.order, "n-gram order");
    train_lm->add_option("--max-vocab", train_lm_args.max_vocab, "vocabulary cap incl. unk");
    train_lm->add_option("--out", train_lm_args.out, "model file")->required();
    train_lm->callback([&]() { run_train_lm(train_lm_args); });

    LmEvalArgs lm_eval_args;
    auto* lm_eval = app.add_subcommand("lm-eval", "language-model warrant choice");
    lm_eval->add_option("--model", lm_eval_args.model, "model file")->required();
    lm_eval->add_option("--instances", lm_eval_args.instances, "instance file")->required();
    lm_eval->add_option("--format", lm_eval_args.format, "tsv or jsonl");
    lm_eval->add_flag("--with-context", lm_eval_args.with_context,
                      "prepend reason and claim when scoring");
    lm_eval->add_option("--out", lm_eval_args.out, "write predictions CSV here");
    lm_eval->callback([&]() { run_lm_eval(lm_eval_args); });

    TrainNeuralArgs train_neural_args;
    auto* train_neural = app.add_subcommand("train-neural", "train the attention classifier");
    train_neural->add_option("--train", train_neural_args.train_path, "training instances")
        ->required();
    train_neural->add_option("--dev", train_neural_args.dev_path, "dev instances")->required();
    train_neural->add_option("--test", train_neural_args.test_path, "test instances");
    train_neural->add_option("--format", train_neural_args.format, "tsv or jsonl");
    train_neural->add_option("--variant", train_neural_args.variant,
                             "standard or intra-warrant");
    train_neural->add_flag("--with-context", train_neural_args.with_context,
                           "prepend debate title and description");
    train_neural->add_option("--out", train_neural_args.out, "params file")->required();
    train_neural->add_option("--log", train_neural_args.log, "training log CSV (best run)");
    train_neural->add_option("--report", train_neural_args.report, "run-report JSON");
    train_neural->add_option("--approach", train_neural_args.approach,
                             "approach name in the run report");
    train_neural->add_option("--seed", train_neural_args.config.seed, "random seed")->required();
    train_neural->add_option("--runs", train_neural_args.config.runs, "training runs");
    train_neural->add_option("--epochs", train_neural_args.config.max_epochs, "max epochs");
    train_neural->add_option("--patience", train_neural_args.config.patience_epochs,
                             "early-stopping patience");
    train_neural->add_option("--dropout", train_neural_args.config.dropout_rate, "dropout rate");
    train_neural->add_option("--lr", train_neural_args.config.learning_rate, "learning rate");
    train_neural->add_option("--batch", train_neural_args.config.batch_size, "batch size");
    train_neural->add_option("--embed-dim", train_neural_args.config.embed_dim, "embedding dim");
    train_neural->add_option("--hidden-dim", train_neural_args.config.hidden_dim,
                             "LSTM hidden dim per direction");
    train_neural->add_option("--embeddings", train_neural_args.config.pretrained_embeddings,
                             "pre-trained embedding file");
    train_neural->add_flag_function(
        "--freeze-embeddings",
        [&](std::int64_t) { train_neural_args.config.train_embeddings = false; },
        "do not update embeddings");
    train_neural->callback([&]() { run_train_neural(train_neural_args); });

    EvaluateArgs evaluate_args;
    auto* evaluate = app.add_subcommand("evaluate", "accuracy of predictions against gold");
    evaluate->add_option("--gold", evaluate_args.gold, "gold instance file")->required();
    evaluate->add_option("--pred", evaluate_args.pred, "predictions CSV");
    evaluate->add_option("--format", evaluate_args.format, "tsv or jsonl");
    evaluate->add_flag("--random", evaluate_args.random, "use the random baseline");
    auto* eval_seed = evaluate->add_option("--seed", evaluate_args.seed, "seed for --random");
    evaluate->add_option("--out", evaluate_args.out, "write the predictions CSV here");
    evaluate->callback([&]() {
        evaluate_args.seed_set = eval_seed->count() > 0;
        run_evaluate(evaluate_args);
    });

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "accuracy table across approaches");
    report->add_option("--runs", report_args.runs, "run-report JSON files")
        ->required()
        ->delimiter(',');
    report->add_option("--out", report_args.out, "write the table here");
    report->add_option("--json", report_args.json_out, "write the JSON twin here");
    report->callback([&]() { run_report(report_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // help goes to stdout, exit 0
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
