#pragma once

#include "evoting/error.hpp"
#include "evoting/labels.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace evoting {

struct Document {
    std::string doc_id;
    std::u32string text;

    bool operator==(const Document &) const = default;
};

// Half-open [start, end) in code points.
struct GoldSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    EventClass label = EventClass::Disposition;
    std::string surface;

    bool operator==(const GoldSpan &) const = default;
};

struct AnnotatedDocument {
    Document document;
    std::vector<GoldSpan> gold;  // sorted by (start, end)

    bool operator==(const AnnotatedDocument &) const = default;
};

using Corpus = std::vector<AnnotatedDocument>;

/// Parses the `T<id>\t<Label> <start> <end>\t<surface>` subset of brat standoff.
/// Lines that do not start with `T` are skipped. Newlines inside the text slice compare
/// equal to spaces in the annotated surface, since a surface must fit on one line.
AnnotatedDocument parse_document(std::string doc_id, std::string_view text_blob, std::string_view annotation_blob);

/// Entity lines numbered T1..Tn in span order. Newlines in surfaces are written as spaces.
std::string serialize_annotations(const AnnotatedDocument &doc);

std::string format_entity_line(std::size_t id, std::string_view label, std::size_t start, std::size_t end,
                               std::string_view surface);

/// Duplicate ids, overlapping gold spans and surface mismatches. Empty iff the corpus is clean.
std::vector<Violation> validate_corpus(const Corpus &corpus);

/// Loads every `<name>.txt` in text_dir with its `<name>.ann` from ann_dir (missing .ann means
/// no gold). Documents are returned sorted by doc_id.
Corpus load_corpus(const std::filesystem::path &text_dir, const std::filesystem::path &ann_dir,
                   std::size_t jobs = 1);

}  // namespace evoting
