#include "evoting/predictions.hpp"

#include "evoting/text.hpp"
#include "records.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace evoting {

void normalize_probs(Probs &p, std::string_view context) {
    double sum = 0.0;
    for (const double v : p) {
        if (!std::isfinite(v) || v < 0.0) {
            throw Error(ErrorCode::ProbabilityError, std::string(context) + ": negative or non-finite entry");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        throw Error(ErrorCode::ProbabilityError, std::string(context) + ": entries sum to " + std::to_string(sum));
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        for (double &v : p) {
            v /= sum;
        }
    }
}

std::size_t argmax(const Probs &p) noexcept {
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.size(); ++k) {
        if (p[k] > p[best]) {
            best = k;
        }
    }
    return best;
}

std::size_t PredictionSet::row_count() const noexcept {
    std::size_t n = 0;
    for (const auto &[id, rows] : docs) {
        n += rows.size();
    }
    return n;
}

namespace {

constexpr std::string_view kProbabilitiesKind = "probabilities";
constexpr std::string_view kLabelsKind = "labels";

struct Header {
    std::string model_id;
    std::array<std::size_t, kTagCount> to_canonical{};  // file column -> canonical index
};

Header parse_header(const detail::Record &r, std::string_view expected_kind, std::string_view source) {
    Header h;
    const auto kind = detail::require<std::string>(r, "kind", source);
    if (kind != expected_kind) {
        detail::schema_error(r, source, "expected kind '" + std::string(expected_kind) + "', got '" + kind + "'");
    }
    h.model_id = detail::require<std::string>(r, "model_id", source);
    if (h.model_id.empty()) {
        detail::schema_error(r, source, "empty model_id");
    }
    const auto tags = r.value.find("tags");
    if (tags == r.value.end() || !tags->is_array() || tags->size() != kTagCount) {
        detail::schema_error(r, source, "header must list exactly 7 tags");
    }
    std::set<std::size_t> seen;
    for (std::size_t k = 0; k < kTagCount; ++k) {
        const auto &name = (*tags)[k];
        const auto tag = name.is_string() ? parse_bio_tag(name.get<std::string>()) : std::nullopt;
        if (!tag || !seen.insert(tag_index(*tag)).second) {
            detail::schema_error(r, source, "header tags are not a permutation of the canonical tag set");
        }
        h.to_canonical[k] = tag_index(*tag);
    }
    return h;
}

detail::json header_json(std::string_view kind, const std::string &model_id) {
    detail::json tags = detail::json::array();
    for (const auto tag : kTags) {
        tags.push_back(std::string(to_string(tag)));
    }
    return detail::json{{"kind", std::string(kind)}, {"model_id", model_id}, {"tags", std::move(tags)}};
}

template <typename Row>
void read_row_position(const detail::Record &r, std::string_view source, std::string &doc_id, Row &row) {
    doc_id = detail::require<std::string>(r, "doc_id", source);
    row.index = detail::require<std::size_t>(r, "token_index", source);
    row.start = detail::require<std::size_t>(r, "start", source);
    row.end = detail::require<std::size_t>(r, "end", source);
    if (row.start >= row.end) {
        detail::schema_error(r, source, "empty or inverted token offsets");
    }
}

template <typename Row>
void insert_sorted(std::map<std::string, std::vector<Row>> &docs, std::string_view source) {
    for (auto &[doc_id, rows] : docs) {
        std::sort(rows.begin(), rows.end(), [](const Row &a, const Row &b) { return a.index < b.index; });
        const auto dup = std::adjacent_find(rows.begin(), rows.end(),
                                            [](const Row &a, const Row &b) { return a.index == b.index; });
        if (dup != rows.end()) {
            throw Error(ErrorCode::DuplicateRow, std::string(source) + ": two rows for (" + doc_id + ", " +
                                                     std::to_string(dup->index) + ")");
        }
    }
}

template <typename Row>
detail::json position_json(const std::string &doc_id, const Row &row) {
    return detail::json{{"doc_id", doc_id}, {"token_index", row.index}, {"start", row.start}, {"end", row.end}};
}

template <typename Row>
std::vector<Violation> check_alignment(const std::map<std::string, std::vector<Row>> &docs,
                                       const TokenizedCorpus &corpus) {
    std::vector<Violation> out;
    std::map<std::string_view, const TokenizedDocument *> by_id;
    for (const auto &doc : corpus) {
        by_id.emplace(doc.doc_id, &doc);
    }
    for (const auto &[doc_id, rows] : docs) {
        if (!by_id.contains(doc_id)) {
            out.push_back({ViolationKind::UnknownDocument, doc_id, std::to_string(rows.size()) + " rows"});
        }
    }
    for (const auto &doc : corpus) {
        const auto it = docs.find(doc.doc_id);
        static const std::vector<Row> kEmpty;
        const auto &rows = it == docs.end() ? kEmpty : it->second;
        std::size_t r = 0;
        for (const auto &token : doc.tokens) {
            while (r < rows.size() && rows[r].index < token.index) {
                ++r;
            }
            if (r == rows.size() || rows[r].index != token.index) {
                out.push_back({ViolationKind::MissingRow, doc.doc_id, "token " + std::to_string(token.index)});
                continue;
            }
            if (rows[r].start != token.start || rows[r].end != token.end) {
                out.push_back({ViolationKind::OffsetMismatch, doc.doc_id,
                               "token " + std::to_string(token.index) + " is (" + std::to_string(token.start) + "," +
                                   std::to_string(token.end) + "), row has (" + std::to_string(rows[r].start) + "," +
                                   std::to_string(rows[r].end) + ")"});
            }
        }
        for (const auto &row : rows) {
            if (row.index >= doc.tokens.size()) {
                out.push_back({ViolationKind::UnknownToken, doc.doc_id, "token " + std::to_string(row.index)});
            }
        }
    }
    return out;
}

template <typename Row>
std::vector<TokenSpan> rows_to_tokens(const std::string &doc_id, const std::vector<Row> &rows) {
    std::vector<TokenSpan> tokens;
    tokens.reserve(rows.size());
    for (const auto &row : rows) {
        tokens.push_back(TokenSpan{doc_id, row.index, row.start, row.end, {}});
    }
    return tokens;
}

}  // namespace

PredictionSet parse_predictions(std::string_view records, std::string_view source) {
    const auto parsed = detail::parse_records(records, source);
    if (parsed.empty()) {
        throw Error(ErrorCode::SchemaError, std::string(source) + ": missing header record");
    }
    const auto header = parse_header(parsed.front(), kProbabilitiesKind, source);
    PredictionSet pred;
    pred.model_id = header.model_id;
    for (std::size_t i = 1; i < parsed.size(); ++i) {
        const auto &r = parsed[i];
        std::string doc_id;
        TokenProbs row;
        read_row_position(r, source, doc_id, row);
        const auto p = r.value.find("p");
        if (p == r.value.end() || !p->is_array() || p->size() != kTagCount) {
            detail::schema_error(r, source, "field 'p' must be an array of 7 numbers");
        }
        for (std::size_t k = 0; k < kTagCount; ++k) {
            if (!(*p)[k].is_number()) {
                detail::schema_error(r, source, "field 'p' must be an array of 7 numbers");
            }
            row.p[header.to_canonical[k]] = (*p)[k].get<double>();
        }
        normalize_probs(row.p, std::string(source) + " line " + std::to_string(r.line_no));
        pred.docs[doc_id].push_back(row);
    }
    insert_sorted(pred.docs, source);
    return pred;
}

PredictionSet load_predictions(const std::filesystem::path &path) {
    return parse_predictions(read_file(path), path.string());
}

std::string serialize_predictions(const PredictionSet &pred) {
    std::string out = detail::to_line(header_json(kProbabilitiesKind, pred.model_id));
    for (const auto &[doc_id, rows] : pred.docs) {
        for (const auto &row : rows) {
            auto record = position_json(doc_id, row);
            record["p"] = row.p;
            out += detail::to_line(record);
        }
    }
    return out;
}

LabelSequence parse_labels(std::string_view records, std::string_view source) {
    const auto parsed = detail::parse_records(records, source);
    if (parsed.empty()) {
        throw Error(ErrorCode::SchemaError, std::string(source) + ": missing header record");
    }
    const auto header = parse_header(parsed.front(), kLabelsKind, source);
    LabelSequence labels;
    labels.model_id = header.model_id;
    for (std::size_t i = 1; i < parsed.size(); ++i) {
        const auto &r = parsed[i];
        std::string doc_id;
        TokenLabel row;
        read_row_position(r, source, doc_id, row);
        const auto name = detail::require<std::string>(r, "tag", source);
        const auto tag = parse_bio_tag(name);
        if (!tag) {
            throw Error(ErrorCode::UnknownLabel, std::string(source) + " line " + std::to_string(r.line_no) +
                                                     ": tag '" + name + "'");
        }
        row.tag = *tag;
        labels.docs[doc_id].push_back(row);
    }
    insert_sorted(labels.docs, source);
    return labels;
}

LabelSequence load_labels(const std::filesystem::path &path) { return parse_labels(read_file(path), path.string()); }

std::string serialize_labels(const LabelSequence &labels) {
    std::string out = detail::to_line(header_json(kLabelsKind, labels.model_id));
    for (const auto &[doc_id, rows] : labels.docs) {
        for (const auto &row : rows) {
            auto record = position_json(doc_id, row);
            record["tag"] = std::string(to_string(row.tag));
            out += detail::to_line(record);
        }
    }
    return out;
}

bool is_label_file(const std::filesystem::path &path) {
    const auto contents = read_file(path);
    const auto eol = contents.find('\n');
    const auto first = detail::parse_records(std::string_view(contents).substr(0, eol), path.string());
    if (first.empty()) {
        throw Error(ErrorCode::SchemaError, path.string() + ": missing header record");
    }
    const auto kind = first.front().value.find("kind");
    return kind != first.front().value.end() && kind->is_string() && kind->get<std::string>() == kLabelsKind;
}

std::vector<Violation> validate_alignment(const PredictionSet &pred, const TokenizedCorpus &corpus) {
    return check_alignment(pred.docs, corpus);
}

std::vector<Violation> validate_alignment(const LabelSequence &labels, const TokenizedCorpus &corpus) {
    return check_alignment(labels.docs, corpus);
}

LabelSequence argmax_labels(const PredictionSet &pred) {
    LabelSequence out;
    out.model_id = pred.model_id;
    for (const auto &[doc_id, rows] : pred.docs) {
        auto &labels = out.docs[doc_id];
        labels.reserve(rows.size());
        for (const auto &row : rows) {
            labels.push_back(TokenLabel{row.index, row.start, row.end, kTags[argmax(row.p)]});
        }
    }
    return out;
}

std::vector<TokenSpan> tokens_of(const std::string &doc_id, const std::vector<TokenProbs> &rows) {
    return rows_to_tokens(doc_id, rows);
}

std::vector<TokenSpan> tokens_of(const std::string &doc_id, const std::vector<TokenLabel> &rows) {
    return rows_to_tokens(doc_id, rows);
}

}  // namespace evoting
