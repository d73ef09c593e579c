// evoting: command-line front end for the ensembling and evaluation library.
//
// Exit codes: 0 success, 1 data error, 2 usage or configuration error.

#include "evoting/parallel.hpp"
#include "evoting/pipeline.hpp"
#include "evoting/text.hpp"

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace evoting;

namespace {

constexpr int kDataError = 1;
constexpr int kConfigError = 2;

[[noreturn]] void usage_error(const std::string &msg) { throw Error(ErrorCode::ConfigError, msg); }

void write_output(const std::optional<fs::path> &out, const std::string &contents) {
    if (out) {
        if (out->has_parent_path()) fs::create_directories(out->parent_path());
        write_file_atomic(*out, contents);
    } else {
        std::cout << contents;
    }
}

Strategy strategy_from(const std::string &name) {
    const auto s = parse_strategy(name);
    if (!s) usage_error("unknown strategy '" + name + "' (soft, hard, weighted)");
    return *s;
}

WeightRuleKind weight_rule_from(const std::string &name) {
    const auto r = parse_weight_rule(name);
    if (!r) usage_error("unknown weight rule '" + name + "' (inverse, complement)");
    return *r;
}

/// "model=0.7,other=0.3" style weights.
WeightVector parse_weight_list(const std::string &list) {
    WeightVector out;
    for (const auto &item : CLI::detail::split(list, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) usage_error("weight '" + item + "' is not model=value");
        try {
            std::size_t used = 0;
            const double w = std::stod(item.substr(eq + 1), &used);
            if (used != item.size() - eq - 1) throw std::invalid_argument(item);
            out.push_back({item.substr(0, eq), w});
        } catch (const std::logic_error &) {
            usage_error("weight '" + item + "' has no numeric value");
        }
    }
    return out;
}

TokenizedCorpus load_tokens(const fs::path &path) {
    try {
        return parse_tokens(read_file(path));
    } catch (const Error &e) {
        throw Error(e.code(), e.detail() + " [" + path.string() + "]");
    }
}

std::string join_ids(const std::vector<PredictionSet> &members) {
    std::string out;
    for (const auto &m : members) out += (out.empty() ? "" : ", ") + m.model_id;
    return out;
}

struct Globals {
    std::size_t jobs = default_jobs();
};

void add_ingest(CLI::App &app, const Globals &g) {
    auto *cmd = app.add_subcommand("ingest", "Load a standoff corpus and report integrity violations");
    auto text_dir = std::make_shared<fs::path>();
    auto ann_dir = std::make_shared<fs::path>();
    auto out = std::make_shared<std::optional<fs::path>>();
    cmd->add_option("--text-dir", *text_dir, "Directory of <doc_id>.txt files")->required();
    cmd->add_option("--ann-dir", *ann_dir, "Directory of <doc_id>.ann files (defaults to --text-dir)");
    cmd->add_option("--out", *out, "Write violations as JSONL here instead of stdout");
    cmd->callback([=, &g] {
        const auto corpus = load_corpus(*text_dir, ann_dir->empty() ? *text_dir : *ann_dir, g.jobs);
        const auto violations = validate_corpus(corpus);
        std::size_t spans = 0;
        for (const auto &d : corpus) spans += d.gold.size();
        spdlog::info("{} documents, {} gold spans, {} violations", corpus.size(), spans, violations.size());
        write_output(*out, serialize_violations(violations));
    });
}

void add_tag(CLI::App &app, const Globals &g) {
    auto *cmd = app.add_subcommand("tag", "Tokenize a corpus and project gold spans to BIO tags");
    auto text_dir = std::make_shared<fs::path>();
    auto ann_dir = std::make_shared<fs::path>();
    auto stoplist = std::make_shared<std::optional<fs::path>>();
    auto out = std::make_shared<std::optional<fs::path>>();
    cmd->add_option("--text-dir", *text_dir, "Directory of <doc_id>.txt files")->required();
    cmd->add_option("--ann-dir", *ann_dir, "Directory of <doc_id>.ann files (defaults to --text-dir)");
    cmd->add_option("--stoplist", *stoplist, "One stop word per line")->check(CLI::ExistingFile);
    cmd->add_option("--out", *out, "Token file (JSONL); stdout when omitted");
    cmd->callback([=, &g] {
        const auto corpus = load_corpus(*text_dir, ann_dir->empty() ? *text_dir : *ann_dir, g.jobs);
        const auto stop = *stoplist ? Stoplist::load(**stoplist) : Stoplist{};
        TaggingSummary summary;
        const auto tagged = tag_corpus(corpus, stop, g.jobs, &summary);
        spdlog::info("{} tokens, {} stop words removed, {} tokens overlapping several spans", summary.tokens,
                     summary.removed_stop_words, summary.multi_overlap_tokens);
        write_output(*out, serialize_tokens(tagged));
    });
}

void add_ece(CLI::App &app, const Globals &g) {
    auto *cmd = app.add_subcommand("ece", "Expected calibration error of each prediction file against gold tags");
    auto tokens = std::make_shared<fs::path>();
    auto bins = std::make_shared<std::size_t>(10);
    auto rule = std::make_shared<std::string>("inverse");
    auto epsilon = std::make_shared<double>(1e-6);
    auto out = std::make_shared<std::optional<fs::path>>();
    auto members = std::make_shared<std::vector<fs::path>>();
    cmd->add_option("--tokens", *tokens, "Tagged token file from 'tag'")->required()->check(CLI::ExistingFile);
    cmd->add_option("--bins", *bins, "Number of equal-width confidence bins")->check(CLI::PositiveNumber);
    cmd->add_option("--weight-rule", *rule, "Rule for the weights printed to stderr (inverse, complement)");
    cmd->add_option("--epsilon", *epsilon, "Smoothing constant of the weight rule")->check(CLI::PositiveNumber);
    cmd->add_option("--out", *out, "Calibration file (JSONL); stdout when omitted");
    cmd->add_option("predictions", *members, "Prediction files")->required()->check(CLI::ExistingFile);
    cmd->callback([=, &g] {
        const auto rule_kind = weight_rule_from(*rule);
        const auto gold = load_tokens(*tokens);
        const auto sets = load_members(*members, &gold, g.jobs);
        std::vector<CalibrationReport> reports(sets.size());
        parallel_for(sets.size(), g.jobs, [&](std::size_t i) { reports[i] = compute_ece(sets[i], gold, *bins); });
        const auto weights = ece_weights(reports, make_weight_rule(rule_kind, *epsilon));
        for (std::size_t i = 0; i < reports.size(); ++i) {
            spdlog::info("{}: ECE {:.4f}, weight {:.4f}", reports[i].model_id, reports[i].ece, weights[i].weight);
        }
        write_output(*out, serialize_calibration(reports));
    });
}

void add_ensemble(CLI::App &app, const Globals &g) {
    auto *cmd = app.add_subcommand("ensemble", "Combine aligned prediction files");
    auto strategy = std::make_shared<std::string>("soft");
    auto weights = std::make_shared<std::string>();
    auto calibration = std::make_shared<std::vector<fs::path>>();
    auto rule = std::make_shared<std::string>("inverse");
    auto epsilon = std::make_shared<double>(1e-6);
    auto tokens = std::make_shared<std::optional<fs::path>>();
    auto out = std::make_shared<std::optional<fs::path>>();
    auto members = std::make_shared<std::vector<fs::path>>();
    cmd->add_option("--strategy", *strategy, "soft, hard or weighted");
    cmd->add_option("--weights", *weights, "Explicit weights as model=value,... (weighted only)");
    cmd->add_option("--calibration", *calibration, "Calibration files whose ECE values give the weights")
        ->check(CLI::ExistingFile);
    cmd->add_option("--weight-rule", *rule, "inverse or complement");
    cmd->add_option("--epsilon", *epsilon, "Smoothing constant of the weight rule")->check(CLI::PositiveNumber);
    cmd->add_option("--tokens", *tokens, "Token file to check member alignment against")->check(CLI::ExistingFile);
    cmd->add_option("--out", *out, "Output file; stdout when omitted");
    cmd->add_option("members", *members, "Member prediction files")->required()->check(CLI::ExistingFile);
    cmd->callback([=, &g] {
        EnsembleConfig config;
        config.strategy = strategy_from(*strategy);
        const auto rule_kind = weight_rule_from(*rule);
        if (config.strategy != Strategy::Weighted && (!weights->empty() || !calibration->empty())) {
            usage_error("--weights and --calibration only apply to --strategy weighted");
        }
        if (!weights->empty() && !calibration->empty()) usage_error("give --weights or --calibration, not both");

        std::optional<TokenizedCorpus> gold;
        if (*tokens) gold = load_tokens(**tokens);
        const auto sets = load_members(*members, gold ? &*gold : nullptr, g.jobs);
        for (const auto &s : sets) config.members.push_back(s.model_id);

        if (config.strategy == Strategy::Weighted) {
            if (!weights->empty()) {
                config.weights = parse_weight_list(*weights);
            } else if (!calibration->empty()) {
                std::vector<CalibrationReport> reports;
                for (const auto &p : *calibration) {
                    const auto loaded = load_calibration(p);
                    reports.insert(reports.end(), loaded.begin(), loaded.end());
                }
                config.weights = ece_weights(reports, make_weight_rule(rule_kind, *epsilon));
            } else {
                usage_error("--strategy weighted needs --weights or --calibration");
            }
        }
        config.validate();
        const auto result = run_ensemble(sets, config);
        spdlog::info("{} vote over {}", to_string(config.strategy), join_ids(sets));
        write_output(*out, result.probabilities ? serialize_predictions(*result.probabilities)
                                                : serialize_labels(*result.labels));
    });
}

void add_decode(CLI::App &app) {
    auto *cmd = app.add_subcommand("decode", "Decode predicted tags into standoff spans, one .ann per document");
    auto input = std::make_shared<fs::path>();
    auto text_dir = std::make_shared<std::optional<fs::path>>();
    auto out_dir = std::make_shared<fs::path>();
    auto medication = std::make_shared<bool>(false);
    cmd->add_option("input", *input, "Prediction or label file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--text-dir", *text_dir, "Document texts, used for surfaces and whitespace merging");
    cmd->add_option("--out-dir", *out_dir, "Directory for <doc_id>.ann")->required();
    cmd->add_flag("--medication", *medication, "Collapse spans into Drug mentions");
    cmd->callback([=] {
        const auto labels = is_label_file(*input) ? load_labels(*input) : argmax_labels(load_predictions(*input));
        auto spans = decode_labels(labels);
        std::map<std::string, std::u32string> texts;
        if (*text_dir) {
            for (const auto &[doc, list] : spans) {
                texts[doc] = decode_utf8(read_file(**text_dir / (doc + ".txt")));
            }
        }
        fs::create_directories(*out_dir);
        std::size_t count = 0;
        for (auto &[doc, list] : spans) {
            std::optional<std::u32string_view> text;
            if (const auto it = texts.find(doc); it != texts.end()) text = it->second;
            if (*medication) list = collapse_to_medication(list, text);
            count += list.size();
            write_file_atomic(*out_dir / (doc + ".ann"), serialize_spans(list, text));
        }
        spdlog::info("{} spans in {} documents", count, spans.size());
    });
}

void add_eval(CLI::App &app, const Globals &g) {
    auto *cmd = app.add_subcommand("eval", "Score predicted standoff spans against gold");
    auto text_dir = std::make_shared<fs::path>();
    auto ann_dir = std::make_shared<fs::path>();
    auto pred_dir = std::make_shared<fs::path>();
    auto task = std::make_shared<std::string>("both");
    auto out = std::make_shared<std::optional<fs::path>>();
    cmd->add_option("--text-dir", *text_dir, "Gold texts")->required();
    cmd->add_option("--ann-dir", *ann_dir, "Gold annotations (defaults to --text-dir)");
    cmd->add_option("--pred-dir", *pred_dir, "Predicted <doc_id>.ann files")->required();
    cmd->add_option("--task", *task, "events, medication or both")->check(CLI::IsMember({"events", "medication", "both"}));
    cmd->add_option("--out", *out, "Metrics file (JSONL); the table always goes to stdout");
    cmd->callback([=, &g] {
        const auto corpus = load_corpus(*text_dir, ann_dir->empty() ? *text_dir : *ann_dir, g.jobs);
        const auto spans = load_span_dir(*pred_dir, &corpus);
        std::vector<MetricsReport> reports;
        for (const auto t : {Task::Events, Task::Medication}) {
            if (*task != "both" && *task != to_string(t)) continue;
            auto [strict, lenient] = evaluate(corpus, spans, t, g.jobs);
            reports.push_back(std::move(strict));
            reports.push_back(std::move(lenient));
        }
        if (*out) write_output(*out, serialize_metrics(reports));
        std::cout << format_metrics_table(reports);
    });
}

void add_report(CLI::App &app) {
    auto *cmd = app.add_subcommand("report", "Print a metrics file as a table");
    auto metrics = std::make_shared<fs::path>();
    cmd->add_option("metrics", *metrics, "metrics.jsonl")->required()->check(CLI::ExistingFile);
    cmd->callback([=] {
        const auto reports = parse_metrics(read_file(*metrics), metrics->string());
        std::cout << format_metrics_table(reports);
    });
}

void add_run(CLI::App &app, const Globals &g, const CLI::Option *jobs_option) {
    auto *cmd = app.add_subcommand("run", "Run ingest, tag, ece, ensemble, decode and eval from a config file");
    auto config_path = std::make_shared<fs::path>();
    auto output_dir = std::make_shared<std::optional<fs::path>>();
    auto strategy = std::make_shared<std::optional<std::string>>();
    cmd->add_option("--config", *config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    cmd->add_option("--output-dir", *output_dir, "Override output_dir");
    cmd->add_option("--strategy", *strategy, "Override strategy");
    cmd->callback([=, &g] {
        auto config = parse_run_config(read_file(*config_path), config_path->parent_path());
        if (*output_dir) config.output_dir = **output_dir;
        if (*strategy) config.strategy = strategy_from(**strategy);
        if (jobs_option->count() > 0) config.jobs = g.jobs;
        const auto result = run_pipeline(config);
        std::cout << format_metrics_table(result.reports);
        spdlog::info("outputs in {}", config.output_dir.string());
    });
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("evoting");
    logger->set_pattern("%^[%l]%$ %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    if (const char *levels = std::getenv("EVOTING_LOG")) spdlog::cfg::helpers::load_levels(levels);
}

}  // namespace

int main(int argc, char **argv) {
    setup_logging();
    CLI::App app{"Ensemble voting and span evaluation for clinical medication events"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);
    Globals g;
    const auto *jobs_option =
        app.add_option("-j,--jobs", g.jobs, "Worker threads (default: hardware concurrency)")->check(CLI::PositiveNumber);

    add_ingest(app, g);
    add_tag(app, g);
    add_ece(app, g);
    add_ensemble(app, g);
    add_decode(app);
    add_eval(app, g);
    add_report(app);
    add_run(app, g, jobs_option);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    } catch (const Error &e) {
        spdlog::error("{}", e.what());
        return e.code() == ErrorCode::ConfigError ? kConfigError : kDataError;
    } catch (const std::exception &e) {
        spdlog::error("{}", e.what());
        return kDataError;
    }
    return 0;
}
