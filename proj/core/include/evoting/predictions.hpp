#pragma once

#include "evoting/error.hpp"
#include "evoting/labels.hpp"
#include "evoting/tokenize.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace evoting {

/// Probability vector indexed by canonical BioTag order.
using Probs = std::array<double, kTagCount>;

inline constexpr double kProbabilityTolerance = 1e-6;

/// Rejects negative/non-finite entries and sums outside 1 +- kProbabilityTolerance, then
/// rescales to unit sum. Vectors already within 1e-12 of unit sum are left bit-for-bit
/// untouched so that reloading a saved set is an identity.
void normalize_probs(Probs &p, std::string_view context);

/// Canonical argmax: the lowest tag index among the maxima.
std::size_t argmax(const Probs &p) noexcept;

struct TokenProbs {
    std::size_t index = 0;
    std::size_t start = 0;
    std::size_t end = 0;
    Probs p{};

    bool operator==(const TokenProbs &) const = default;
};

struct TokenLabel {
    std::size_t index = 0;
    std::size_t start = 0;
    std::size_t end = 0;
    BioTag tag = BioTag::O;

    bool operator==(const TokenLabel &) const = default;
};

/// One model's token-level probabilities. Rows of each document are sorted by index.
struct PredictionSet {
    std::string model_id;
    std::map<std::string, std::vector<TokenProbs>> docs;

    [[nodiscard]] std::size_t row_count() const noexcept;
    bool operator==(const PredictionSet &) const = default;
};

/// Hard labels, e.g. the output of hard voting.
struct LabelSequence {
    std::string model_id;
    std::map<std::string, std::vector<TokenLabel>> docs;

    bool operator==(const LabelSequence &) const = default;
};

// Record files: the first line is a header
//   {"kind":"probabilities"|"labels","model_id":...,"tags":[7 tag names]}
// followed by one row per token
//   {"doc_id":...,"token_index":...,"start":...,"end":...,"p":[p0..p6]}   (probabilities)
//   {"doc_id":...,"token_index":...,"start":...,"end":...,"tag":"B-..."}  (labels)
// A header listing the tags in a different order is remapped to canonical order on load.

PredictionSet parse_predictions(std::string_view records, std::string_view source = "prediction file");
PredictionSet load_predictions(const std::filesystem::path &path);
std::string serialize_predictions(const PredictionSet &pred);

LabelSequence parse_labels(std::string_view records, std::string_view source = "label file");
LabelSequence load_labels(const std::filesystem::path &path);
std::string serialize_labels(const LabelSequence &labels);

/// True when the file header declares kind "labels".
bool is_label_file(const std::filesystem::path &path);

/// MissingRow per corpus token without a row, UnknownDocument per foreign doc_id,
/// UnknownToken per row past the end of a document, OffsetMismatch when offsets disagree.
std::vector<Violation> validate_alignment(const PredictionSet &pred, const TokenizedCorpus &corpus);
std::vector<Violation> validate_alignment(const LabelSequence &labels, const TokenizedCorpus &corpus);

LabelSequence argmax_labels(const PredictionSet &pred);

/// Token offsets carried by prediction rows, for span decoding.
std::vector<TokenSpan> tokens_of(const std::string &doc_id, const std::vector<TokenProbs> &rows);
std::vector<TokenSpan> tokens_of(const std::string &doc_id, const std::vector<TokenLabel> &rows);

}  // namespace evoting
