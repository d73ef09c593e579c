#include "evoting/span_decode.hpp"
#include "evoting/tokenize.hpp"

#include "synthetic.hpp"

#include <gtest/gtest.h>

namespace evoting {
namespace {

std::vector<std::string> surfaces(const std::vector<TokenSpan> &tokens) {
    std::vector<std::string> out;
    for (const auto &t : tokens) out.push_back(t.surface);
    return out;
}

Document doc(const std::string &text) { return Document{"d", decode_utf8(text)}; }

TEST(Tokenize, WhitespaceSplitWithOffsets) {
    const auto tokens = tokenize(doc("He is not"));
    ASSERT_EQ(tokens.size(), 3U);
    EXPECT_EQ(surfaces(tokens), (std::vector<std::string>{"He", "is", "not"}));
    EXPECT_EQ(tokens[0].start, 0U);
    EXPECT_EQ(tokens[0].end, 2U);
    EXPECT_EQ(tokens[1].start, 3U);
    EXPECT_EQ(tokens[1].end, 5U);
    EXPECT_EQ(tokens[2].start, 6U);
    EXPECT_EQ(tokens[2].end, 9U);
    EXPECT_EQ(tokens[2].index, 2U);
}

TEST(Tokenize, PunctuationIsolated) {
    EXPECT_EQ(surfaces(tokenize(doc("stopped lisinopril."))), (std::vector<std::string>{"stopped", "lisinopril", "."}));
    EXPECT_EQ(surfaces(tokenize(doc("b.i.d,(10mg)"))),
              (std::vector<std::string>{"b", ".", "i", ".", "d", ",", "(", "10mg", ")"}));
}

TEST(Tokenize, EmptyAndWhitespaceOnly) {
    EXPECT_TRUE(tokenize(doc("")).empty());
    EXPECT_TRUE(tokenize(doc(" \n\t ")).empty());
}

TEST(Tokenize, NonAsciiLettersStayInWords) {
    const auto tokens = tokenize(doc("na\xC3\xAFve pt"));
    EXPECT_EQ(surfaces(tokens), (std::vector<std::string>{"na\xC3\xAFve", "pt"}));
    EXPECT_EQ(tokens[1].start, 6U);
}

TEST(Stoplist, TableOneFiltering) {
    const auto tokens = tokenize(doc("He is not currently using metronidazole pill any longer"));
    const std::vector<std::string> words{"is", "not", "any"};
    const auto kept = apply_stoplist(tokens, Stoplist(words));
    EXPECT_EQ(surfaces(kept),
              (std::vector<std::string>{"He", "currently", "using", "metronidazole", "pill", "longer"}));
    for (std::size_t i = 0; i < kept.size(); ++i) {
        EXPECT_EQ(kept[i].index, i);
    }
    // Offsets are those of the original sentence.
    EXPECT_EQ(kept[1].start, 10U);
}

TEST(Stoplist, CaseInsensitiveEmptyAndTotal) {
    const auto tokens = tokenize(doc("NOT any Is"));
    EXPECT_EQ(apply_stoplist(tokens, Stoplist{}), tokens);
    const std::vector<std::string> words{"not", "ANY", "is"};
    EXPECT_TRUE(apply_stoplist(tokens, Stoplist(words)).empty());
}

TEST(Stoplist, LoadSkipsCommentsAndBlankLines) {
    synth::TempDir dir("stoplist");
    synth::write_text(dir.path() / "stop.txt", "# clinical stop words\nis\n\n  Not  \r\nany\n");
    const auto s = Stoplist::load(dir.path() / "stop.txt");
    EXPECT_EQ(s.size(), 3U);
    EXPECT_TRUE(s.contains("NOT"));
    EXPECT_FALSE(s.contains("#"));
}

TEST(Stoplist, SurvivorOffsetsUnchangedProperty) {
    synth::Rng rng(11);
    const std::vector<std::string> words{"mg", "daily", "was", ",", "."};
    const Stoplist stop(words);
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = synth::random_aligned_doc(rng, "d");
        const auto kept = apply_stoplist(d.tokens, stop);
        std::size_t j = 0;
        for (const auto &t : kept) {
            while (d.tokens[j].start != t.start) ++j;
            EXPECT_EQ(d.tokens[j].end, t.end);
            EXPECT_EQ(d.tokens[j].surface, t.surface);
        }
    }
}

TEST(Projection, ToySentence) {
    const auto parsed = parse_document("d", synth::kToyText, synth::kToyAnn);
    const auto tokens = tokenize(parsed.document);
    const auto projection = project_gold_to_bio(tokens, parsed.gold);
    EXPECT_EQ(projection.tags, (std::vector<BioTag>{BioTag::O, BioTag::O, BioTag::O, BioTag::BDisposition, BioTag::O,
                                                    BioTag::O}));
    EXPECT_EQ(projection.multi_overlap_tokens, 0U);
}

TEST(Projection, TwoTokenChunkAndNoGold) {
    const auto parsed = parse_document("d", "insulin glargine", "T1\tNoDisposition 0 16\tinsulin glargine");
    const auto tokens = tokenize(parsed.document);
    EXPECT_EQ(project_gold_to_bio(tokens, parsed.gold).tags,
              (std::vector<BioTag>{BioTag::BNoDisposition, BioTag::INoDisposition}));
    EXPECT_EQ(project_gold_to_bio(tokens, {}).tags, (std::vector<BioTag>{BioTag::O, BioTag::O}));
}

TEST(Projection, EarliestStartingSpanWinsAndIsCounted) {
    // Token "abcdef" overlaps both spans.
    const auto parsed = parse_document("d", "abcdef gh",
                                       "T1\tUndetermined 0 3\tabc\nT2\tDisposition 2 9\tcdef gh\n");
    const auto tokens = tokenize(parsed.document);
    const auto projection = project_gold_to_bio(tokens, parsed.gold);
    EXPECT_EQ(projection.tags, (std::vector<BioTag>{BioTag::BUndetermined, BioTag::BDisposition}));
    EXPECT_EQ(projection.multi_overlap_tokens, 1U);
}

TEST(Projection, AdjacentSameClassSpansStaySeparate) {
    const auto parsed = parse_document("d", "aa bb", "T1\tDisposition 0 2\taa\nT2\tDisposition 3 5\tbb\n");
    EXPECT_EQ(project_gold_to_bio(tokenize(parsed.document), parsed.gold).tags,
              (std::vector<BioTag>{BioTag::BDisposition, BioTag::BDisposition}));
}

bool legal_iob2(const std::vector<BioTag> &tags) {
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (!is_inside(tags[i])) continue;
        if (i == 0 || tags[i - 1] == BioTag::O || event_class_of(tags[i - 1]) != event_class_of(tags[i])) return false;
    }
    return true;
}

TEST(Projection, AlwaysLegalIob2EvenWithOverlappingGold) {
    synth::Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        auto d = synth::random_aligned_doc(rng, "d");
        // Add overlapping spans on arbitrary character ranges.
        const auto n = d.document.text.size();
        if (n > 2) {
            for (int k = 0; k < 3; ++k) {
                const auto s = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
                const auto e = std::uniform_int_distribution<std::size_t>(s + 1, n)(rng);
                d.gold.push_back(GoldSpan{s, e, static_cast<EventClass>(k), ""});
            }
        }
        const auto projection = project_gold_to_bio(d.tokens, d.gold);
        ASSERT_EQ(projection.tags.size(), d.tokens.size());
        ASSERT_TRUE(legal_iob2(projection.tags)) << "trial " << trial;
    }
}

TEST(Projection, DecodeOfProjectionReproducesGold) {
    synth::Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const auto d = synth::random_aligned_doc(rng, "d");
        const auto decoded = decode_bio(d.tokens, project_gold_to_bio(d.tokens, d.gold).tags);
        ASSERT_EQ(decoded.size(), d.gold.size());
        for (std::size_t i = 0; i < decoded.size(); ++i) {
            EXPECT_EQ(decoded[i].start, d.gold[i].start);
            EXPECT_EQ(decoded[i].end, d.gold[i].end);
            EXPECT_EQ(decoded[i].label, to_span_label(d.gold[i].label));
        }
    }
}

TEST(TokenFile, RoundTripAndValidation) {
    Corpus corpus{parse_document("b", synth::kToyText, synth::kToyAnn), parse_document("a", "x y", "")};
    TaggingSummary summary;
    const auto tagged = tag_corpus(corpus, Stoplist{}, 2, &summary);
    EXPECT_EQ(summary.tokens, 8U);
    ASSERT_EQ(tagged[0].doc_id, "a");
    EXPECT_EQ(parse_tokens(serialize_tokens(tagged)), tagged);

    EXPECT_THROW(parse_tokens(R"({"doc_id":"a","index":1,"start":0,"end":1,"surface":"x"})"), Error);
    EXPECT_THROW(parse_tokens(R"({"doc_id":"a","index":0,"start":0,"end":1,"surface":"x","tag":"B-Drug"})"), Error);
    EXPECT_THROW(parse_tokens(R"({"doc_id":"a","index":0,"start":0,"surface":"x"})"), Error);
}

}  // namespace
}  // namespace evoting
