#pragma once

#include "evoting/labels.hpp"
#include "evoting/standoff.hpp"

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evoting {

struct TokenSpan {
    std::string doc_id;
    std::size_t index = 0;  // ordinal after stop-word removal
    std::size_t start = 0;
    std::size_t end = 0;
    std::string surface;

    bool operator==(const TokenSpan &) const = default;
};

/// Maximal runs of word characters are tokens, every other non-space character is a token
/// of its own, and whitespace only separates.
std::vector<TokenSpan> tokenize(const Document &document);

/// Entries are lowercased on construction; lookups lowercase the token surface (ASCII only).
class Stoplist {
public:
    Stoplist() = default;
    explicit Stoplist(std::span<const std::string> words);

    /// One word per line; blank lines and lines starting with '#' are skipped.
    static Stoplist load(const std::filesystem::path &path);

    [[nodiscard]] bool contains(std::string_view surface) const;
    [[nodiscard]] bool empty() const noexcept { return words_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return words_.size(); }

private:
    std::set<std::string, std::less<>> words_;
};

/// Drops stop words and re-indexes the survivors; offsets are never touched.
std::vector<TokenSpan> apply_stoplist(std::vector<TokenSpan> tokens, const Stoplist &stoplist);

struct Projection {
    std::vector<BioTag> tags;
    std::size_t multi_overlap_tokens = 0;  // tokens that touched more than one gold span
};

/// IOB2 projection. A token takes the class of the earliest-starting gold span it overlaps;
/// it is tagged B- when the preceding token was not assigned to the same span, I- otherwise,
/// so the output is always a legal IOB2 sequence.
Projection project_gold_to_bio(std::span<const TokenSpan> tokens, std::span<const GoldSpan> gold);

struct TokenizedDocument {
    std::string doc_id;
    std::vector<TokenSpan> tokens;
    std::vector<BioTag> tags;  // one per token when has_gold
    bool has_gold = false;

    bool operator==(const TokenizedDocument &) const = default;
};

using TokenizedCorpus = std::vector<TokenizedDocument>;  // sorted by doc_id

struct TaggingSummary {
    std::size_t tokens = 0;
    std::size_t removed_stop_words = 0;
    std::size_t multi_overlap_tokens = 0;
};

TokenizedCorpus tag_corpus(const Corpus &corpus, const Stoplist &stoplist, std::size_t jobs = 1,
                           TaggingSummary *summary = nullptr);

/// Line-delimited JSON, one record per token: doc_id, index, start, end, surface, [tag].
std::string serialize_tokens(const TokenizedCorpus &corpus);
TokenizedCorpus parse_tokens(std::string_view records);

}  // namespace evoting
