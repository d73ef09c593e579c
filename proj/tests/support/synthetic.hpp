#pragma once

// Synthetic corpora and prediction sets for property tests and the acceptance suite.

#include "evoting/calibration.hpp"
#include "evoting/metrics.hpp"
#include "evoting/predictions.hpp"
#include "evoting/standoff.hpp"
#include "evoting/text.hpp"
#include "evoting/tokenize.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace evoting::synth {

using Rng = std::mt19937_64;

class TempDir {
public:
    explicit TempDir(const std::string &tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("evoting_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    [[nodiscard]] const std::filesystem::path &path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path &path, const std::string &contents) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream(path, std::ios::binary) << contents;
}

inline SpanLabel random_event_label(Rng &rng) {
    return static_cast<SpanLabel>(std::uniform_int_distribution<int>(0, 2)(rng));
}

/// Up to max_spans spans with random offsets in [0, text_len), sorted by (start, end).
/// Spans may overlap each other.
inline std::vector<PredictedSpan> random_spans(Rng &rng, std::size_t max_spans, std::size_t text_len,
                                               std::size_t label_count = 3) {
    const auto n = std::uniform_int_distribution<std::size_t>(0, max_spans)(rng);
    std::uniform_int_distribution<std::size_t> pos(0, text_len - 1);
    std::uniform_int_distribution<std::size_t> len(1, 6);
    std::uniform_int_distribution<int> lab(0, static_cast<int>(label_count) - 1);
    std::vector<PredictedSpan> spans;
    for (std::size_t i = 0; i < n; ++i) {
        const auto s = pos(rng);
        spans.push_back(PredictedSpan{"doc", s, std::min(text_len, s + len(rng)), static_cast<SpanLabel>(lab(rng))});
    }
    std::sort(spans.begin(), spans.end(), [](const auto &a, const auto &b) {
        return a.start != b.start ? a.start < b.start : a.end < b.end;
    });
    return spans;
}

/// Random probability vector; `peak` concentrates mass on one random tag.
inline Probs random_probs(Rng &rng, bool peak = false) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Probs p{};
    double sum = 0.0;
    for (auto &v : p) {
        v = u(rng);
        sum += v;
    }
    if (peak) {
        const auto k = std::uniform_int_distribution<std::size_t>(0, kTagCount - 1)(rng);
        p[k] += 3.0;
        sum += 3.0;
    }
    for (auto &v : p) v /= sum;
    return p;
}

inline Probs one_hot(std::size_t k) {
    Probs p{};
    p[k] = 1.0;
    return p;
}

/// Token layout shared by all members: doc_count documents of tokens_per_doc tokens each.
struct Layout {
    std::vector<std::string> doc_ids;
    std::size_t tokens_per_doc = 0;
};

inline Layout make_layout(std::size_t doc_count, std::size_t tokens_per_doc) {
    Layout l;
    for (std::size_t d = 0; d < doc_count; ++d) l.doc_ids.push_back("doc" + std::to_string(d));
    l.tokens_per_doc = tokens_per_doc;
    return l;
}

/// Prediction set over a layout; token i occupies characters [3i, 3i + 2).
template <typename VectorFn>
PredictionSet make_set(const std::string &model_id, const Layout &layout, VectorFn &&vector_for) {
    PredictionSet s;
    s.model_id = model_id;
    for (const auto &doc : layout.doc_ids) {
        auto &rows = s.docs[doc];
        for (std::size_t i = 0; i < layout.tokens_per_doc; ++i) {
            rows.push_back(TokenProbs{i, 3 * i, 3 * i + 2, vector_for(doc, i)});
        }
    }
    return s;
}

inline PredictionSet random_set(Rng &rng, const std::string &model_id, const Layout &layout, bool peak = false) {
    return make_set(model_id, layout, [&](const std::string &, std::size_t) { return random_probs(rng, peak); });
}

/// Gold corpus matching a layout (tokens only), with the given tag per token.
template <typename TagFn>
TokenizedCorpus make_gold(const Layout &layout, TagFn &&tag_for) {
    TokenizedCorpus corpus;
    for (const auto &doc : layout.doc_ids) {
        TokenizedDocument td;
        td.doc_id = doc;
        td.has_gold = true;
        for (std::size_t i = 0; i < layout.tokens_per_doc; ++i) {
            td.tokens.push_back(TokenSpan{doc, i, 3 * i, 3 * i + 2, "xx"});
            td.tags.push_back(tag_for(doc, i));
        }
        corpus.push_back(std::move(td));
    }
    return corpus;
}

/// Predictor whose accuracy at confidence c is c: confidences uniform on (0.2, 1], the top tag
/// is the gold tag with probability c, and the remaining mass is spread evenly.
struct CalibratedSample {
    PredictionSet pred;
    TokenizedCorpus gold;
};

inline CalibratedSample calibrated_predictor(Rng &rng, std::size_t tokens, std::size_t per_doc = 1000) {
    const auto layout = make_layout((tokens + per_doc - 1) / per_doc, per_doc);
    std::uniform_real_distribution<double> conf(0.2, 1.0);
    std::uniform_int_distribution<std::size_t> tag(0, kTagCount - 1);
    std::uniform_int_distribution<std::size_t> other(1, kTagCount - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::map<std::pair<std::string, std::size_t>, BioTag> gold_tags;
    auto pred = make_set("calibrated", layout, [&](const std::string &doc, std::size_t i) {
        const double c = conf(rng);
        const auto g = tag(rng);
        const auto top = u(rng) < c ? g : (g + other(rng)) % kTagCount;
        Probs p{};
        for (auto &v : p) v = (1.0 - c) / static_cast<double>(kTagCount - 1);
        p[top] = c;
        gold_tags[{doc, i}] = kTags[g];
        return p;
    });
    auto gold = make_gold(layout, [&](const std::string &doc, std::size_t i) { return gold_tags.at({doc, i}); });
    return {std::move(pred), std::move(gold)};
}

/// A document whose gold spans start and end on token boundaries and never overlap.
struct AlignedDoc {
    Document document;
    std::vector<TokenSpan> tokens;
    std::vector<GoldSpan> gold;
};

inline AlignedDoc random_aligned_doc(Rng &rng, const std::string &doc_id) {
    static const std::vector<std::string> kWords{"insulin", "glargine", "metformin", "stopped", "continue",
                                                 "mg",      "daily",    "10",        "pain",    "Lasix",
                                                 "was",     "held",     "dose",      "b.i.d",   "naïve"};
    static const std::vector<std::string> kSeparators{" ", "  ", ", ", ". ", "\n", " (", ") ", " - "};
    std::uniform_int_distribution<std::size_t> word(0, kWords.size() - 1);
    std::uniform_int_distribution<std::size_t> sep(0, kSeparators.size() - 1);
    const auto n_words = std::uniform_int_distribution<std::size_t>(0, 25)(rng);
    std::string text;
    for (std::size_t i = 0; i < n_words; ++i) {
        if (i > 0) text += kSeparators[sep(rng)];
        text += kWords[word(rng)];
    }
    AlignedDoc out;
    out.document = Document{doc_id, decode_utf8(text)};
    out.tokens = tokenize(out.document);

    std::size_t i = 0;
    std::uniform_int_distribution<int> coin(0, 2);
    std::uniform_int_distribution<std::size_t> span_len(1, 3);
    while (i < out.tokens.size()) {
        if (coin(rng) == 0) {
            const auto last = std::min(out.tokens.size(), i + span_len(rng)) - 1;
            const auto s = out.tokens[i].start;
            const auto e = out.tokens[last].end;
            const auto label = static_cast<EventClass>(std::uniform_int_distribution<int>(0, 2)(rng));
            out.gold.push_back(GoldSpan{s, e, label, encode_utf8(std::u32string_view(out.document.text).substr(s, e - s))});
            i = last + 1;
        } else {
            ++i;
        }
    }
    return out;
}

/// The running example: a stop-word-filtered clinical sentence with one Disposition mention.
inline constexpr const char *kToyText = "He currently using metronidazole pill longer";
inline constexpr const char *kToyAnn = "T1\tDisposition 19 32\tmetronidazole\n";

}  // namespace evoting::synth
