#include "evoting/standoff.hpp"

#include "evoting/parallel.hpp"
#include "evoting/text.hpp"
#include "entity_lines.hpp"

#include <algorithm>
#include <charconv>
#include <map>

namespace evoting {

namespace {

std::u32string flatten_newlines(std::u32string_view s) {
    std::u32string out(s);
    std::replace(out.begin(), out.end(), U'\n', U' ');
    std::replace(out.begin(), out.end(), U'\r', U' ');
    return out;
}

std::string flatten_newlines(std::string_view s) {
    std::string out(s);
    std::replace(out.begin(), out.end(), '\n', ' ');
    std::replace(out.begin(), out.end(), '\r', ' ');
    return out;
}

bool parse_offset(std::string_view field, std::size_t &value) {
    if (field.empty()) {
        return false;
    }
    const auto *last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), last, value);
    return ec == std::errc{} && ptr == last;
}

std::string line_context(std::size_t line_no, std::string_view line) {
    return "line " + std::to_string(line_no) + ": '" + std::string(line) + "'";
}

}  // namespace

namespace detail {

std::vector<EntityLine> split_entity_lines(std::string_view blob, std::string_view doc_id) {
    std::vector<EntityLine> lines;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < blob.size()) {
        auto eol = blob.find('\n', pos);
        if (eol == std::string_view::npos) {
            eol = blob.size();
        }
        auto line = blob.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty() || line.front() != 'T') {
            continue;
        }
        const auto malformed = [&] {
            return Error(ErrorCode::MalformedLine, std::string(doc_id) + " " + line_context(line_no, line));
        };

        const auto tab1 = line.find('\t');
        const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
        if (tab1 == std::string_view::npos || tab2 == std::string_view::npos || tab1 == 1) {
            throw malformed();
        }
        const auto middle = line.substr(tab1 + 1, tab2 - tab1 - 1);
        const auto sp1 = middle.find(' ');
        const auto sp2 = sp1 == std::string_view::npos ? sp1 : middle.find(' ', sp1 + 1);
        EntityLine entity;
        if (sp1 == std::string_view::npos || sp2 == std::string_view::npos ||
            !parse_offset(middle.substr(sp1 + 1, sp2 - sp1 - 1), entity.start) ||
            !parse_offset(middle.substr(sp2 + 1), entity.end)) {
            throw malformed();
        }
        entity.line_no = line_no;
        entity.raw = line;
        entity.label = middle.substr(0, sp1);
        entity.surface = line.substr(tab2 + 1);
        lines.push_back(entity);
    }
    return lines;
}

void check_entity_against_text(const EntityLine &line, std::u32string_view text, std::string_view doc_id) {
    if (line.start >= line.end || line.end > text.size()) {
        throw Error(ErrorCode::OffsetOutOfRange, std::string(doc_id) + " span (" + std::to_string(line.start) + "," +
                                                     std::to_string(line.end) + ") on text of length " +
                                                     std::to_string(text.size()));
    }
    const auto slice = text.substr(line.start, line.end - line.start);
    if (flatten_newlines(slice) != flatten_newlines(decode_utf8(line.surface))) {
        throw Error(ErrorCode::SurfaceMismatch, std::string(doc_id) + " " + line_context(line.line_no, line.raw) +
                                                    " but text has '" + encode_utf8(slice) + "'");
    }
}

}  // namespace detail

AnnotatedDocument parse_document(std::string doc_id, std::string_view text_blob, std::string_view annotation_blob) {
    AnnotatedDocument result;
    result.document.doc_id = std::move(doc_id);
    result.document.text = decode_utf8(text_blob);
    const auto &id = result.document.doc_id;
    const std::u32string_view text = result.document.text;

    for (const auto &line : detail::split_entity_lines(annotation_blob, id)) {
        const auto label = parse_event_class(line.label);
        if (!label) {
            throw Error(ErrorCode::UnknownLabel,
                        id + " label '" + std::string(line.label) + "' on line " + std::to_string(line.line_no));
        }
        detail::check_entity_against_text(line, text, id);
        result.gold.push_back(
            GoldSpan{line.start, line.end, *label, encode_utf8(text.substr(line.start, line.end - line.start))});
    }

    std::stable_sort(result.gold.begin(), result.gold.end(), [](const GoldSpan &a, const GoldSpan &b) {
        return a.start != b.start ? a.start < b.start : a.end < b.end;
    });
    return result;
}

std::string format_entity_line(std::size_t id, std::string_view label, std::size_t start, std::size_t end,
                               std::string_view surface) {
    std::string line = "T" + std::to_string(id) + "\t";
    line += label;
    line += " " + std::to_string(start) + " " + std::to_string(end) + "\t";
    line += flatten_newlines(surface);
    line += "\n";
    return line;
}

std::string serialize_annotations(const AnnotatedDocument &doc) {
    std::string out;
    std::size_t id = 1;
    for (const auto &span : doc.gold) {
        out += format_entity_line(id++, to_string(span.label), span.start, span.end, span.surface);
    }
    return out;
}

std::vector<Violation> validate_corpus(const Corpus &corpus) {
    std::vector<Violation> violations;
    std::map<std::string, std::size_t> seen;
    for (const auto &doc : corpus) {
        const auto &id = doc.document.doc_id;
        if (++seen[id] == 2) {
            violations.push_back({ViolationKind::DuplicateId, id, "doc_id appears more than once"});
        }
        const auto &text = doc.document.text;
        for (std::size_t i = 0; i < doc.gold.size(); ++i) {
            const auto &a = doc.gold[i];
            if (a.end > text.size() || a.start >= a.end ||
                encode_utf8(std::u32string_view(text).substr(a.start, a.end - a.start)) != a.surface) {
                violations.push_back({ViolationKind::SurfaceMismatch, id,
                                      "span (" + std::to_string(a.start) + "," + std::to_string(a.end) + ")"});
            }
            for (std::size_t j = i + 1; j < doc.gold.size() && doc.gold[j].start < a.end; ++j) {
                const auto &b = doc.gold[j];
                violations.push_back({ViolationKind::OverlapViolation, id,
                                      "(" + std::to_string(a.start) + "," + std::to_string(a.end) + ") overlaps (" +
                                          std::to_string(b.start) + "," + std::to_string(b.end) + ")"});
            }
        }
    }
    return violations;
}

Corpus load_corpus(const std::filesystem::path &text_dir, const std::filesystem::path &ann_dir, std::size_t jobs) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(text_dir)) {
        throw Error(ErrorCode::IoError, "not a directory: " + text_dir.string());
    }
    std::vector<fs::path> texts;
    for (const auto &entry : fs::directory_iterator(text_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            texts.push_back(entry.path());
        }
    }
    std::sort(texts.begin(), texts.end(),
              [](const fs::path &a, const fs::path &b) { return a.stem().string() < b.stem().string(); });

    Corpus corpus(texts.size());
    parallel_for(texts.size(), jobs, [&](std::size_t i) {
        const auto stem = texts[i].stem().string();
        const auto ann_path = ann_dir / (stem + ".ann");
        const std::string ann = fs::exists(ann_path) ? read_file(ann_path) : std::string{};
        try {
            corpus[i] = parse_document(stem, read_file(texts[i]), ann);
        } catch (const Error &e) {
            throw Error(e.code(), e.detail() + " [" + ann_path.string() + "]");
        }
    });
    return corpus;
}

}  // namespace evoting
