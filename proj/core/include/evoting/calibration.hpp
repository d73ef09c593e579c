#pragma once

#include "evoting/predictions.hpp"
#include "evoting/tokenize.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evoting {

struct CalibrationBin {
    double lower = 0.0;  // exclusive, except bin 0 which also takes confidence 0
    double upper = 0.0;  // inclusive
    std::size_t count = 0;
    double mean_confidence = 0.0;
    double accuracy = 0.0;

    bool operator==(const CalibrationBin &) const = default;
};

struct CalibrationReport {
    std::string model_id;
    double ece = 0.0;
    std::vector<CalibrationBin> bins;

    [[nodiscard]] std::size_t token_count() const noexcept;
    /// Σ (n_b / n) |accuracy_b − mean_confidence_b| from the stored bins.
    [[nodiscard]] double ece_from_bins() const noexcept;

    bool operator==(const CalibrationReport &) const = default;
};

/// Index of the equal-width bin (b/n, (b+1)/n] holding `confidence`; 0 joins bin 0.
/// Boundaries are the doubles (b+1)/n, so a confidence of exactly 0.3 lands in (0.2, 0.3].
std::size_t confidence_bin(double confidence, std::size_t num_bins) noexcept;

/// Token-level ECE over all seven tags, with max-probability confidence and argmax accuracy.
/// Throws EmptyInput for zero tokens and AlignmentError when pred and gold disagree.
CalibrationReport compute_ece(const PredictionSet &pred, const TokenizedCorpus &gold, std::size_t num_bins = 10);

struct ModelWeight {
    std::string model_id;
    double weight = 0.0;

    bool operator==(const ModelWeight &) const = default;
};

using WeightVector = std::vector<ModelWeight>;

/// Maps an ECE to an unnormalized, positive score; higher score means more weight.
using WeightRule = std::function<double(double ece)>;

/// 1 / (ece + epsilon)
WeightRule inverse_ece_rule(double epsilon = 1e-6);
/// (1 - ece) + epsilon
WeightRule complement_ece_rule(double epsilon = 1e-6);

/// Scores each report with `rule` and normalizes to unit sum; order follows the input.
WeightVector ece_weights(std::span<const CalibrationReport> reports, const WeightRule &rule);
WeightVector ece_weights(std::span<const CalibrationReport> reports, double epsilon = 1e-6);

/// One JSON record per report.
std::string serialize_calibration(std::span<const CalibrationReport> reports);
std::vector<CalibrationReport> parse_calibration(std::string_view records, std::string_view source = "calibration file");
std::vector<CalibrationReport> load_calibration(const std::filesystem::path &path);

}  // namespace evoting
