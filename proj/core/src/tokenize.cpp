#include "evoting/tokenize.hpp"

#include "evoting/parallel.hpp"
#include "evoting/text.hpp"
#include "records.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace evoting {

std::vector<TokenSpan> tokenize(const Document &document) {
    const auto &text = document.text;
    std::vector<TokenSpan> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_space(text[i])) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        if (is_word_char(text[i])) {
            while (j < text.size() && is_word_char(text[j])) {
                ++j;
            }
        }
        tokens.push_back(TokenSpan{document.doc_id, tokens.size(), i, j,
                                   encode_utf8(std::u32string_view(text).substr(i, j - i))});
        i = j;
    }
    return tokens;
}

Stoplist::Stoplist(std::span<const std::string> words) {
    for (const auto &w : words) {
        words_.insert(ascii_lower(w));
    }
}

Stoplist Stoplist::load(const std::filesystem::path &path) {
    const auto contents = read_file(path);
    std::vector<std::string> words;
    std::size_t pos = 0;
    while (pos < contents.size()) {
        auto eol = contents.find('\n', pos);
        if (eol == std::string::npos) {
            eol = contents.size();
        }
        auto line = std::string_view(contents).substr(pos, eol - pos);
        pos = eol + 1;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string_view::npos || line[first] == '#') {
            continue;
        }
        const auto last = line.find_last_not_of(" \t\r");
        words.emplace_back(line.substr(first, last - first + 1));
    }
    return Stoplist(words);
}

bool Stoplist::contains(std::string_view surface) const { return words_.contains(ascii_lower(surface)); }

std::vector<TokenSpan> apply_stoplist(std::vector<TokenSpan> tokens, const Stoplist &stoplist) {
    if (stoplist.empty()) {
        return tokens;
    }
    std::erase_if(tokens, [&](const TokenSpan &t) { return stoplist.contains(t.surface); });
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        tokens[i].index = i;
    }
    return tokens;
}

Projection project_gold_to_bio(std::span<const TokenSpan> tokens, std::span<const GoldSpan> gold) {
    constexpr auto kNone = std::numeric_limits<std::size_t>::max();

    // Gold is normally sorted already; index it by (start, end, input order) regardless.
    std::vector<std::size_t> order(gold.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return gold[a].start != gold[b].start ? gold[a].start < gold[b].start : gold[a].end < gold[b].end;
    });

    Projection result;
    result.tags.reserve(tokens.size());
    std::size_t previous = kNone;
    for (const auto &token : tokens) {
        std::size_t winner = kNone;
        std::size_t overlaps = 0;
        for (const auto g : order) {
            if (gold[g].start >= token.end) {
                break;
            }
            if (gold[g].end > token.start) {
                if (winner == kNone) {
                    winner = g;
                }
                ++overlaps;
            }
        }
        if (overlaps > 1) {
            ++result.multi_overlap_tokens;
        }
        if (winner == kNone) {
            result.tags.push_back(BioTag::O);
        } else {
            const auto cls = gold[winner].label;
            result.tags.push_back(winner == previous ? inside_tag(cls) : begin_tag(cls));
        }
        previous = winner;
    }
    return result;
}

TokenizedCorpus tag_corpus(const Corpus &corpus, const Stoplist &stoplist, std::size_t jobs, TaggingSummary *summary) {
    TokenizedCorpus out(corpus.size());
    std::vector<TaggingSummary> partial(corpus.size());
    parallel_for(corpus.size(), jobs, [&](std::size_t i) {
        const auto &doc = corpus[i];
        auto raw = tokenize(doc.document);
        const auto before = raw.size();
        auto tokens = apply_stoplist(std::move(raw), stoplist);
        auto projection = project_gold_to_bio(tokens, doc.gold);
        partial[i] = {tokens.size(), before - tokens.size(), projection.multi_overlap_tokens};
        out[i] = TokenizedDocument{doc.document.doc_id, std::move(tokens), std::move(projection.tags), true};
    });
    std::stable_sort(out.begin(), out.end(),
                     [](const TokenizedDocument &a, const TokenizedDocument &b) { return a.doc_id < b.doc_id; });
    if (summary != nullptr) {
        *summary = {};
        for (const auto &p : partial) {
            summary->tokens += p.tokens;
            summary->removed_stop_words += p.removed_stop_words;
            summary->multi_overlap_tokens += p.multi_overlap_tokens;
        }
    }
    return out;
}

std::string serialize_tokens(const TokenizedCorpus &corpus) {
    std::string out;
    for (const auto &doc : corpus) {
        for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
            const auto &t = doc.tokens[i];
            detail::json record{{"doc_id", t.doc_id}, {"index", t.index}, {"start", t.start},
                                {"end", t.end},       {"surface", t.surface}};
            if (doc.has_gold) {
                record["tag"] = std::string(to_string(doc.tags[i]));
            }
            out += detail::to_line(record);
        }
    }
    return out;
}

TokenizedCorpus parse_tokens(std::string_view records) {
    constexpr std::string_view kWhat = "token file";
    std::map<std::string, std::vector<std::pair<TokenSpan, std::optional<BioTag>>>> rows;
    for (const auto &r : detail::parse_records(records, kWhat)) {
        TokenSpan t;
        t.doc_id = detail::require<std::string>(r, "doc_id", kWhat);
        t.index = detail::require<std::size_t>(r, "index", kWhat);
        t.start = detail::require<std::size_t>(r, "start", kWhat);
        t.end = detail::require<std::size_t>(r, "end", kWhat);
        t.surface = detail::require<std::string>(r, "surface", kWhat);
        if (t.start >= t.end) {
            detail::schema_error(r, kWhat, "empty or inverted token offsets");
        }
        std::optional<BioTag> tag;
        if (r.value.contains("tag")) {
            const auto name = detail::require<std::string>(r, "tag", kWhat);
            tag = parse_bio_tag(name);
            if (!tag) {
                throw Error(ErrorCode::UnknownLabel, std::string(kWhat) + " line " + std::to_string(r.line_no) +
                                                         ": tag '" + name + "'");
            }
        }
        auto doc_id = t.doc_id;
        rows[doc_id].emplace_back(std::move(t), tag);
    }

    TokenizedCorpus corpus;
    for (auto &[doc_id, list] : rows) {
        std::sort(list.begin(), list.end(), [](const auto &a, const auto &b) { return a.first.index < b.first.index; });
        TokenizedDocument doc;
        doc.doc_id = doc_id;
        doc.has_gold = list.front().second.has_value();
        for (std::size_t i = 0; i < list.size(); ++i) {
            auto &[token, tag] = list[i];
            if (token.index != i) {
                throw Error(ErrorCode::SchemaError, "token file: document '" + doc_id +
                                                        "' token indices are not contiguous from 0 (found " +
                                                        std::to_string(token.index) + " at position " +
                                                        std::to_string(i) + ")");
            }
            if (i > 0 && token.start < doc.tokens.back().end) {
                throw Error(ErrorCode::SchemaError, "token file: document '" + doc_id + "' tokens overlap at index " +
                                                        std::to_string(i));
            }
            if (tag.has_value() != doc.has_gold) {
                throw Error(ErrorCode::SchemaError, "token file: document '" + doc_id +
                                                        "' mixes tagged and untagged tokens");
            }
            if (tag) {
                doc.tags.push_back(*tag);
            }
            doc.tokens.push_back(std::move(token));
        }
        corpus.push_back(std::move(doc));
    }
    return corpus;
}

}  // namespace evoting
