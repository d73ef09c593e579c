#include "evoting/pipeline.hpp"

#include "evoting/parallel.hpp"
#include "evoting/text.hpp"
#include "records.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <memory>

namespace evoting {

namespace fs = std::filesystem;

std::string_view to_string(WeightRuleKind kind) noexcept {
    return kind == WeightRuleKind::Inverse ? "inverse" : "complement";
}

std::optional<WeightRuleKind> parse_weight_rule(std::string_view name) noexcept {
    if (name == "inverse") return WeightRuleKind::Inverse;
    if (name == "complement") return WeightRuleKind::Complement;
    return std::nullopt;
}

WeightRule make_weight_rule(WeightRuleKind kind, double epsilon) {
    return kind == WeightRuleKind::Inverse ? inverse_ece_rule(epsilon) : complement_ece_rule(epsilon);
}

namespace {

[[noreturn]] void config_error(const std::string &msg) { throw Error(ErrorCode::ConfigError, msg); }

void require_dir(const fs::path &p, std::string_view key) {
    if (p.empty()) {
        config_error(std::string(key) + " is not set");
    }
    if (!fs::is_directory(p)) {
        config_error(std::string(key) + " is not a directory: " + p.string());
    }
}

void require_file(const fs::path &p, std::string_view key) {
    if (!fs::is_regular_file(p)) {
        config_error(std::string(key) + " does not exist: " + p.string());
    }
}

bool has_calibration_corpus(const RunConfig &c) {
    return c.calibration_text_dir.has_value() && !c.calibration_predictions.empty();
}

}  // namespace

void RunConfig::validate() const {
    require_dir(text_dir, "text_dir");
    require_dir(ann_dir, "ann_dir");
    if (predictions.empty()) {
        config_error("no prediction files given");
    }
    for (const auto &p : predictions) {
        require_file(p, "prediction file");
    }
    if (output_dir.empty()) {
        config_error("output_dir is not set");
    }
    if (num_bins == 0) {
        config_error("num_bins must be positive");
    }
    if (!(epsilon > 0.0)) {
        config_error("epsilon must be positive");
    }
    if (stoplist) {
        require_file(*stoplist, "stoplist");
    }
    for (const auto &p : calibration_reports) {
        require_file(p, "calibration report");
    }
    if (calibration_text_dir) {
        require_dir(*calibration_text_dir, "calibration_text_dir");
        require_dir(calibration_ann_dir.value_or(*calibration_text_dir), "calibration_ann_dir");
    }
    for (const auto &p : calibration_predictions) {
        require_file(p, "calibration prediction file");
    }
    if (strategy == Strategy::Weighted) {
        if (calibration_reports.empty() && !has_calibration_corpus(*this)) {
            config_error("weighted voting requires calibration_reports or a calibration corpus with predictions");
        }
        if (!calibration_reports.empty() && has_calibration_corpus(*this)) {
            config_error("give either calibration_reports or a calibration corpus, not both");
        }
    }
}

RunConfig parse_run_config(std::string_view json_text, const fs::path &base_dir) {
    const auto j = detail::json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        config_error("config is not a JSON object");
    }
    const auto resolve = [&](const std::string &s) {
        const fs::path p(s);
        return p.is_absolute() ? p : base_dir / p;
    };
    RunConfig c;
    try {
        for (const auto &[key, value] : j.items()) {
            if (key == "text_dir") {
                c.text_dir = resolve(value.get<std::string>());
            } else if (key == "ann_dir") {
                c.ann_dir = resolve(value.get<std::string>());
            } else if (key == "predictions") {
                for (const auto &p : value) c.predictions.push_back(resolve(p.get<std::string>()));
            } else if (key == "strategy") {
                const auto s = parse_strategy(value.get<std::string>());
                if (!s) config_error("unknown strategy '" + value.get<std::string>() + "'");
                c.strategy = *s;
            } else if (key == "calibration_reports") {
                for (const auto &p : value) c.calibration_reports.push_back(resolve(p.get<std::string>()));
            } else if (key == "calibration_text_dir") {
                c.calibration_text_dir = resolve(value.get<std::string>());
            } else if (key == "calibration_ann_dir") {
                c.calibration_ann_dir = resolve(value.get<std::string>());
            } else if (key == "calibration_predictions") {
                for (const auto &p : value) c.calibration_predictions.push_back(resolve(p.get<std::string>()));
            } else if (key == "weight_rule") {
                const auto r = parse_weight_rule(value.get<std::string>());
                if (!r) config_error("unknown weight_rule '" + value.get<std::string>() + "'");
                c.weight_rule = *r;
            } else if (key == "epsilon") {
                c.epsilon = value.get<double>();
            } else if (key == "stoplist") {
                c.stoplist = resolve(value.get<std::string>());
            } else if (key == "num_bins") {
                c.num_bins = value.get<std::size_t>();
            } else if (key == "output_dir") {
                c.output_dir = resolve(value.get<std::string>());
            } else if (key == "jobs") {
                c.jobs = value.get<std::size_t>();
            } else {
                config_error("unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception &e) {
        config_error(std::string("bad config value: ") + e.what());
    }
    return c;
}

std::string run_config_json(const RunConfig &c) {
    const auto paths = [](const std::vector<fs::path> &v) {
        detail::json out = detail::json::array();
        for (const auto &p : v) out.push_back(p.string());
        return out;
    };
    detail::json j{{"text_dir", c.text_dir.string()},
                   {"ann_dir", c.ann_dir.string()},
                   {"predictions", paths(c.predictions)},
                   {"strategy", std::string(to_string(c.strategy))},
                   {"calibration_reports", paths(c.calibration_reports)},
                   {"calibration_predictions", paths(c.calibration_predictions)},
                   {"weight_rule", std::string(to_string(c.weight_rule))},
                   {"epsilon", c.epsilon},
                   {"num_bins", c.num_bins},
                   {"output_dir", c.output_dir.string()},
                   {"jobs", c.jobs}};
    if (c.calibration_text_dir) j["calibration_text_dir"] = c.calibration_text_dir->string();
    if (c.calibration_ann_dir) j["calibration_ann_dir"] = c.calibration_ann_dir->string();
    if (c.stoplist) j["stoplist"] = c.stoplist->string();
    return j.dump(2);
}

std::string sha256_file(const fs::path &path) {
    const auto data = read_file(path);
    const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw Error(ErrorCode::IoError, "SHA-256 failed for " + path.string());
    }
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

std::string build_manifest(const RunConfig &config, std::string_view started_at) {
    std::vector<fs::path> inputs;
    const auto add_dir = [&](const fs::path &dir, std::string_view ext) {
        std::vector<fs::path> files;
        for (const auto &e : fs::directory_iterator(dir)) {
            if (e.is_regular_file() && e.path().extension() == ext) files.push_back(e.path());
        }
        std::sort(files.begin(), files.end());
        inputs.insert(inputs.end(), files.begin(), files.end());
    };
    add_dir(config.text_dir, ".txt");
    add_dir(config.ann_dir, ".ann");
    inputs.insert(inputs.end(), config.predictions.begin(), config.predictions.end());
    inputs.insert(inputs.end(), config.calibration_reports.begin(), config.calibration_reports.end());
    if (config.calibration_text_dir) {
        add_dir(*config.calibration_text_dir, ".txt");
        add_dir(config.calibration_ann_dir.value_or(*config.calibration_text_dir), ".ann");
    }
    inputs.insert(inputs.end(), config.calibration_predictions.begin(), config.calibration_predictions.end());
    if (config.stoplist) inputs.push_back(*config.stoplist);

    detail::json digests = detail::json::array();
    for (const auto &p : inputs) {
        digests.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    }
    detail::json manifest{{"tool", "evoting"},
                          {"version", std::string(kToolVersion)},
                          {"started_at", std::string(started_at)},
                          {"config", detail::json::parse(run_config_json(config))},
                          {"inputs", std::move(digests)}};
    return manifest.dump(2) + "\n";
}

std::vector<PredictionSet> load_members(const std::vector<fs::path> &paths, const TokenizedCorpus *tokens,
                                        std::size_t jobs) {
    std::vector<PredictionSet> members(paths.size());
    parallel_for(paths.size(), jobs, [&](std::size_t i) {
        members[i] = load_predictions(paths[i]);
        if (tokens != nullptr) {
            const auto violations = validate_alignment(members[i], *tokens);
            if (!violations.empty()) {
                const auto &v = violations.front();
                throw Error(ErrorCode::AlignmentError,
                            paths[i].string() + ": " + std::to_string(violations.size()) + " violation(s), first " +
                                std::string(to_string(v.kind)) + " in " + v.doc_id + " (" + v.detail + ")");
            }
        }
    });
    return members;
}

void write_span_dir(const fs::path &dir, const SpanMap &spans, const Corpus *corpus) {
    fs::create_directories(dir);
    std::map<std::string_view, const AnnotatedDocument *> by_id;
    if (corpus != nullptr) {
        for (const auto &doc : *corpus) by_id.emplace(doc.document.doc_id, &doc);
    }
    for (const auto &[doc_id, list] : spans) {
        std::optional<std::u32string_view> text;
        if (const auto it = by_id.find(doc_id); it != by_id.end()) {
            text = it->second->document.text;
        }
        write_file_atomic(dir / (doc_id + ".ann"), serialize_spans(list, text));
    }
}

std::string serialize_violations(const std::vector<Violation> &violations) {
    std::string out;
    for (const auto &v : violations) {
        out += detail::to_line(detail::json{{"kind", "violation"},
                                            {"violation", std::string(to_string(v.kind))},
                                            {"doc_id", v.doc_id},
                                            {"detail", v.detail}});
    }
    return out;
}

namespace {

template <typename Fn>
auto stage(std::string_view name, Fn &&fn) {
    spdlog::debug("stage {}: start", name);
    try {
        return fn();
    } catch (const Error &e) {
        throw Error(e.code(), "stage '" + std::string(name) + "': " + e.detail());
    } catch (const fs::filesystem_error &e) {
        throw Error(ErrorCode::IoError, "stage '" + std::string(name) + "': " + e.what());
    }
}

std::string utc_now() {
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                   std::chrono::system_clock::now())));
}

}  // namespace

PipelineResult run_pipeline(const RunConfig &config) {
    config.validate();
    const auto jobs = std::max<std::size_t>(1, config.jobs);
    const auto &out = config.output_dir;
    fs::create_directories(out);
    write_file_atomic(out / "manifest.json", build_manifest(config, utc_now()));

    PipelineResult result;
    const auto corpus = stage("ingest", [&] { return load_corpus(config.text_dir, config.ann_dir, jobs); });
    result.documents = corpus.size();
    result.corpus_violations = validate_corpus(corpus);
    for (const auto &v : result.corpus_violations) {
        spdlog::warn("{} in {}: {}", to_string(v.kind), v.doc_id, v.detail);
    }
    write_file_atomic(out / "corpus_violations.jsonl", serialize_violations(result.corpus_violations));
    spdlog::info("ingest: {} documents, {} violations", corpus.size(), result.corpus_violations.size());

    const auto stoplist = config.stoplist ? Stoplist::load(*config.stoplist) : Stoplist{};
    TaggingSummary summary;
    const auto tokens = stage("tag", [&] { return tag_corpus(corpus, stoplist, jobs, &summary); });
    result.tokens = summary.tokens;
    write_file_atomic(out / "tokens.jsonl", serialize_tokens(tokens));
    spdlog::info("tag: {} tokens, {} stop words removed, {} multi-overlap tokens", summary.tokens,
                 summary.removed_stop_words, summary.multi_overlap_tokens);

    const auto members = stage("ensemble", [&] { return load_members(config.predictions, &tokens, jobs); });

    EnsembleConfig ensemble_config;
    ensemble_config.strategy = config.strategy;
    for (const auto &m : members) ensemble_config.members.push_back(m.model_id);

    if (config.strategy == Strategy::Weighted) {
        result.calibration = stage("ece", [&] {
            std::vector<CalibrationReport> reports;
            if (!config.calibration_reports.empty()) {
                for (const auto &p : config.calibration_reports) {
                    auto loaded = load_calibration(p);
                    reports.insert(reports.end(), loaded.begin(), loaded.end());
                }
                return reports;
            }
            const auto cal_corpus = load_corpus(*config.calibration_text_dir,
                                                config.calibration_ann_dir.value_or(*config.calibration_text_dir), jobs);
            const auto cal_tokens = tag_corpus(cal_corpus, stoplist, jobs);
            const auto cal_members = load_members(config.calibration_predictions, &cal_tokens, jobs);
            reports.resize(cal_members.size());
            parallel_for(cal_members.size(), jobs,
                         [&](std::size_t i) { reports[i] = compute_ece(cal_members[i], cal_tokens, config.num_bins); });
            return reports;
        });
        write_file_atomic(out / "calibration.jsonl", serialize_calibration(result.calibration));
        ensemble_config.weights =
            stage("ece", [&] { return ece_weights(result.calibration, make_weight_rule(config.weight_rule, config.epsilon)); });
        for (const auto &w : *ensemble_config.weights) {
            spdlog::info("weight {} = {:.4f}", w.model_id, w.weight);
        }
    }

    const auto fused = stage("ensemble", [&] { return run_ensemble(members, ensemble_config); });
    if (fused.probabilities) {
        write_file_atomic(out / "ensemble.predictions.jsonl", serialize_predictions(*fused.probabilities));
    } else {
        write_file_atomic(out / "ensemble.labels.jsonl", serialize_labels(*fused.labels));
    }

    auto spans = stage("decode", [&] { return decode_labels(*fused.labels); });
    for (const auto &doc : corpus) {
        spans.try_emplace(doc.document.doc_id);
    }
    write_span_dir(out / "decoded", spans, &corpus);

    stage("eval", [&] {
        for (const auto task : {Task::Events, Task::Medication}) {
            auto [strict, lenient] = evaluate(corpus, spans, task, jobs);
            result.reports.push_back(std::move(strict));
            result.reports.push_back(std::move(lenient));
        }
        return 0;
    });
    write_file_atomic(out / "metrics.jsonl", serialize_metrics(result.reports));
    write_file_atomic(out / "metrics.txt", format_metrics_table(result.reports));
    return result;
}

}  // namespace evoting
