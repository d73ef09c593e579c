#pragma once

#include "evoting/labels.hpp"
#include "evoting/predictions.hpp"
#include "evoting/standoff.hpp"
#include "evoting/tokenize.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evoting {

struct PredictedSpan {
    std::string doc_id;
    std::size_t start = 0;
    std::size_t end = 0;
    SpanLabel label = SpanLabel::Disposition;

    bool operator==(const PredictedSpan &) const = default;
};

/// Spans of one corpus, keyed by doc_id; each list sorted by (start, end).
using SpanMap = std::map<std::string, std::vector<PredictedSpan>>;

/// IOB2 decoding with orphan repair: an I-X that does not continue an open X span opens a new
/// one, and O closes whatever is open. Span ends come from the last token's end offset.
/// Throws LengthMismatch when tokens and tags differ in length.
std::vector<PredictedSpan> decode_bio(std::span<const TokenSpan> tokens, std::span<const BioTag> tags);

/// Relabels every span as Drug and merges neighbours that overlap or touch. With `text`, spans
/// separated only by whitespace merge as well.
std::vector<PredictedSpan> collapse_to_medication(std::span<const PredictedSpan> spans,
                                                  std::optional<std::u32string_view> text = std::nullopt);

/// Decodes every document of a label sequence.
SpanMap decode_labels(const LabelSequence &labels);

/// Gold spans in the same shape as predictions.
std::vector<PredictedSpan> gold_spans(const AnnotatedDocument &doc);

/// Standoff entity lines for one document. Surfaces are cut from `text` when given.
std::string serialize_spans(std::span<const PredictedSpan> spans, std::optional<std::u32string_view> text);

/// Parses predicted standoff, accepting Drug alongside the event classes. When `text` is given,
/// offsets are bounds-checked and surfaces verified as for gold.
std::vector<PredictedSpan> parse_spans(std::string doc_id, std::string_view annotation_blob,
                                       std::optional<std::u32string_view> text = std::nullopt);

/// Reads `<doc_id>.ann` for every file in dir.
SpanMap load_span_dir(const std::filesystem::path &dir, const Corpus *corpus = nullptr);

}  // namespace evoting
