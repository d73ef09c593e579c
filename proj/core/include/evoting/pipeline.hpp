#pragma once

#include "evoting/calibration.hpp"
#include "evoting/ensemble.hpp"
#include "evoting/metrics.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evoting {

inline constexpr std::string_view kToolVersion = "0.3.0";

enum class WeightRuleKind { Inverse, Complement };

std::string_view to_string(WeightRuleKind kind) noexcept;
std::optional<WeightRuleKind> parse_weight_rule(std::string_view name) noexcept;
WeightRule make_weight_rule(WeightRuleKind kind, double epsilon);

struct RunConfig {
    std::filesystem::path text_dir;
    std::filesystem::path ann_dir;
    std::vector<std::filesystem::path> predictions;
    Strategy strategy = Strategy::Soft;

    // Weight source for weighted voting: precomputed reports, or a calibration corpus with
    // one prediction file per member.
    std::vector<std::filesystem::path> calibration_reports;
    std::optional<std::filesystem::path> calibration_text_dir;
    std::optional<std::filesystem::path> calibration_ann_dir;
    std::vector<std::filesystem::path> calibration_predictions;
    WeightRuleKind weight_rule = WeightRuleKind::Inverse;
    double epsilon = 1e-6;

    std::optional<std::filesystem::path> stoplist;
    std::size_t num_bins = 10;
    std::filesystem::path output_dir;
    std::size_t jobs = 1;

    /// Throws ConfigError naming the first problem found.
    void validate() const;
};

/// Reads a JSON config. Relative paths resolve against `base_dir`.
/// Keys: text_dir, ann_dir, predictions[], strategy, calibration_reports[],
/// calibration_text_dir, calibration_ann_dir, calibration_predictions[], weight_rule,
/// epsilon, stoplist, num_bins, output_dir, jobs.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path &base_dir);
std::string run_config_json(const RunConfig &config);

/// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path &path);

/// Every input the run reads, with its digest, plus the config snapshot.
std::string build_manifest(const RunConfig &config, std::string_view started_at);

struct PipelineResult {
    std::vector<MetricsReport> reports;  // events strict/lenient, medication strict/lenient
    std::vector<CalibrationReport> calibration;
    std::size_t documents = 0;
    std::size_t tokens = 0;
    std::vector<Violation> corpus_violations;
};

/// ingest -> tag -> (ece) -> ensemble -> decode -> eval. Files written to output_dir:
///   manifest.json (first), corpus_violations.jsonl, tokens.jsonl, [calibration.jsonl],
///   ensemble.predictions.jsonl | ensemble.labels.jsonl, decoded/<doc>.ann,
///   metrics.jsonl, metrics.txt
/// Errors are rethrown with the failing stage prefixed to the message.
PipelineResult run_pipeline(const RunConfig &config);

// Stage helpers shared with the standalone CLI subcommands.

/// Loads and validates each file; alignment violations against `tokens` raise AlignmentError.
std::vector<PredictionSet> load_members(const std::vector<std::filesystem::path> &paths,
                                        const TokenizedCorpus *tokens, std::size_t jobs);

/// Writes `<doc_id>.ann` for every document of `spans` into dir (created if missing).
void write_span_dir(const std::filesystem::path &dir, const SpanMap &spans, const Corpus *corpus);

std::string serialize_violations(const std::vector<Violation> &violations);

}  // namespace evoting
