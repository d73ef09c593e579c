#include "evoting/span_decode.hpp"

#include "entity_lines.hpp"
#include "evoting/text.hpp"

#include <algorithm>

namespace evoting {

namespace {

bool span_less(const PredictedSpan &a, const PredictedSpan &b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
}

}  // namespace

std::vector<PredictedSpan> decode_bio(std::span<const TokenSpan> tokens, std::span<const BioTag> tags) {
    if (tokens.size() != tags.size()) {
        throw Error(ErrorCode::LengthMismatch, std::to_string(tokens.size()) + " tokens but " +
                                                   std::to_string(tags.size()) + " tags");
    }
    std::vector<PredictedSpan> spans;
    std::optional<PredictedSpan> open;
    const auto close = [&] {
        if (open) {
            spans.push_back(std::move(*open));
            open.reset();
        }
    };
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto tag = tags[i];
        if (tag == BioTag::O) {
            close();
            continue;
        }
        const auto label = to_span_label(event_class_of(tag));
        if (is_inside(tag) && open && open->label == label) {
            open->end = tokens[i].end;
            continue;
        }
        close();
        open = PredictedSpan{tokens[i].doc_id, tokens[i].start, tokens[i].end, label};
    }
    close();
    return spans;
}

std::vector<PredictedSpan> collapse_to_medication(std::span<const PredictedSpan> spans,
                                                  std::optional<std::u32string_view> text) {
    std::vector<PredictedSpan> sorted(spans.begin(), spans.end());
    std::stable_sort(sorted.begin(), sorted.end(), span_less);

    const auto bridgeable = [&](std::size_t from, std::size_t to) {
        if (to <= from) {
            return true;
        }
        if (!text || to > text->size()) {
            return false;
        }
        return std::all_of(text->begin() + static_cast<std::ptrdiff_t>(from),
                           text->begin() + static_cast<std::ptrdiff_t>(to), is_space);
    };

    std::vector<PredictedSpan> out;
    for (auto &span : sorted) {
        span.label = SpanLabel::Drug;
        if (!out.empty() && bridgeable(out.back().end, span.start)) {
            out.back().end = std::max(out.back().end, span.end);
        } else {
            out.push_back(std::move(span));
        }
    }
    return out;
}

SpanMap decode_labels(const LabelSequence &labels) {
    SpanMap out;
    for (const auto &[doc_id, rows] : labels.docs) {
        const auto tokens = tokens_of(doc_id, rows);
        std::vector<BioTag> tags;
        tags.reserve(rows.size());
        for (const auto &row : rows) {
            tags.push_back(row.tag);
        }
        out[doc_id] = decode_bio(tokens, tags);
    }
    return out;
}

std::vector<PredictedSpan> gold_spans(const AnnotatedDocument &doc) {
    std::vector<PredictedSpan> out;
    out.reserve(doc.gold.size());
    for (const auto &g : doc.gold) {
        out.push_back(PredictedSpan{doc.document.doc_id, g.start, g.end, to_span_label(g.label)});
    }
    return out;
}

std::string serialize_spans(std::span<const PredictedSpan> spans, std::optional<std::u32string_view> text) {
    std::string out;
    std::size_t id = 1;
    for (const auto &s : spans) {
        std::string surface;
        if (text && s.end <= text->size() && s.start < s.end) {
            surface = encode_utf8(text->substr(s.start, s.end - s.start));
        }
        out += format_entity_line(id++, to_string(s.label), s.start, s.end, surface);
    }
    return out;
}

std::vector<PredictedSpan> parse_spans(std::string doc_id, std::string_view annotation_blob,
                                       std::optional<std::u32string_view> text) {
    std::vector<PredictedSpan> out;
    for (const auto &line : detail::split_entity_lines(annotation_blob, doc_id)) {
        const auto label = parse_span_label(line.label);
        if (!label) {
            throw Error(ErrorCode::UnknownLabel,
                        doc_id + " label '" + std::string(line.label) + "' on line " + std::to_string(line.line_no));
        }
        if (text) {
            detail::check_entity_against_text(line, *text, doc_id);
        } else if (line.start >= line.end) {
            throw Error(ErrorCode::OffsetOutOfRange, doc_id + " empty span on line " + std::to_string(line.line_no));
        }
        out.push_back(PredictedSpan{doc_id, line.start, line.end, *label});
    }
    std::stable_sort(out.begin(), out.end(), span_less);
    return out;
}

SpanMap load_span_dir(const std::filesystem::path &dir, const Corpus *corpus) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) {
        throw Error(ErrorCode::IoError, "not a directory: " + dir.string());
    }
    std::map<std::string, const AnnotatedDocument *> by_id;
    if (corpus != nullptr) {
        for (const auto &doc : *corpus) {
            by_id.emplace(doc.document.doc_id, &doc);
        }
    }
    SpanMap out;
    for (const auto &entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".ann") {
            continue;
        }
        const auto doc_id = entry.path().stem().string();
        std::optional<std::u32string_view> text;
        if (corpus != nullptr) {
            const auto it = by_id.find(doc_id);
            if (it == by_id.end()) {
                throw Error(ErrorCode::UnknownDocument, entry.path().string() + " has no matching gold document");
            }
            text = it->second->document.text;
        }
        try {
            out[doc_id] = parse_spans(doc_id, read_file(entry.path()), text);
        } catch (const Error &e) {
            throw Error(e.code(), e.detail() + " [" + entry.path().string() + "]");
        }
    }
    return out;
}

}  // namespace evoting
