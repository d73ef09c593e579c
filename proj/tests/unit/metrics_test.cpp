#include "evoting/metrics.hpp"

#include "oracles.hpp"
#include "synthetic.hpp"

#include <gtest/gtest.h>

namespace evoting {
namespace {

PredictedSpan span(std::size_t s, std::size_t e, SpanLabel l = SpanLabel::Disposition) {
    return PredictedSpan{"d", s, e, l};
}

TEST(Prf, HandExamples) {
    const auto a = prf(8, 2, 2);
    EXPECT_DOUBLE_EQ(a.precision, 0.8);
    EXPECT_DOUBLE_EQ(a.recall, 0.8);
    EXPECT_NEAR(a.f, 0.8, 1e-15);
    const auto b = prf(1, 3, 0);
    EXPECT_DOUBLE_EQ(b.precision, 0.25);
    EXPECT_DOUBLE_EQ(b.recall, 1.0);
    EXPECT_NEAR(b.f, 0.4, 1e-15);
    EXPECT_EQ(prf(0, 0, 0), (Prf{0, 0, 0}));
    EXPECT_EQ(prf(0, 5, 0), (Prf{0, 0, 0}));
    EXPECT_EQ(prf(0, 0, 5), (Prf{0, 0, 0}));
    EXPECT_DOUBLE_EQ(f_score(0.0, 0.0), 0.0);
}

TEST(Prf, FScoreFromReportedPrecisionRecall) {
    EXPECT_NEAR(f_score(0.8720, 0.8104), 0.8401, 1e-4);
    EXPECT_NEAR(f_score(0.8924, 0.8294), 0.8597, 1e-4);
    EXPECT_NEAR(f_score(0.8484, 0.9235), 0.8844, 1e-4);
}

TEST(Prf, FLiesBetweenPrecisionAndRecall) {
    synth::Rng rng(3);
    std::uniform_int_distribution<std::size_t> c(0, 50);
    for (int trial = 0; trial < 5000; ++trial) {
        const auto r = prf(c(rng), c(rng), c(rng));
        if (r.precision == 0.0 || r.recall == 0.0) {
            ASSERT_EQ(r.f, 0.0);
            continue;
        }
        ASSERT_GE(r.f, std::min(r.precision, r.recall) - 1e-15);
        ASSERT_LE(r.f, std::max(r.precision, r.recall) + 1e-15);
    }
}

TEST(MicroMetrics, PoolsCountsBeforeDividing) {
    MatchCounts counts;
    counts[SpanLabel::Disposition] = {3, 1, 1};
    counts[SpanLabel::NoDisposition] = {1, 1, 3};
    const auto m = micro_metrics(counts);
    EXPECT_NEAR(m.precision, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(m.recall, 0.5, 1e-15);
    EXPECT_NEAR(m.f, 4.0 / 7.0, 1e-15);
}

TEST(MacroMetrics, AveragesOverFixedUniverse) {
    MatchCounts counts;
    counts[SpanLabel::Disposition] = {1, 0, 0};
    counts[SpanLabel::Undetermined] = {1, 1, 0};
    const auto m = macro_metrics(counts, Task::Events);
    EXPECT_NEAR(m.precision, 0.5, 1e-15);
    EXPECT_NEAR(m.recall, 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(m.f, (1.0 + 0.0 + 2.0 / 3.0) / 3.0, 1e-15);

    MatchCounts drug;
    drug[SpanLabel::Drug] = {2, 2, 0};
    const auto d = macro_metrics(drug, Task::Medication);
    EXPECT_DOUBLE_EQ(d.precision, 0.5);
    EXPECT_DOUBLE_EQ(d.recall, 1.0);
    EXPECT_EQ(class_universe(Task::Medication).size(), 1U);
    EXPECT_EQ(class_universe(Task::Events).size(), 3U);
}

TEST(MatchSpans, StrictNeedsExactOffsetsAndLabel) {
    const std::vector<PredictedSpan> gold{span(0, 5), span(10, 14)};
    const std::vector<PredictedSpan> pred{span(0, 5), span(10, 13), span(20, 22)};
    const auto c = match_spans(gold, pred, MatchMode::Strict)[SpanLabel::Disposition];
    EXPECT_EQ(c, (ClassCounts{1, 2, 1}));
    const std::vector<PredictedSpan> relabeled{span(0, 5, SpanLabel::NoDisposition)};
    const std::vector<PredictedSpan> one_gold{span(0, 5)};
    const auto r = match_spans(one_gold, relabeled, MatchMode::Lenient);
    EXPECT_EQ(r[SpanLabel::Disposition], (ClassCounts{0, 0, 1}));
    EXPECT_EQ(r[SpanLabel::NoDisposition], (ClassCounts{0, 1, 0}));
}

TEST(MatchSpans, LenientIsOneToOne) {
    const std::vector<PredictedSpan> gold{span(0, 5), span(6, 10)};
    const std::vector<PredictedSpan> pred{span(0, 10)};
    const auto c = match_spans(gold, pred, MatchMode::Lenient)[SpanLabel::Disposition];
    EXPECT_EQ(c, (ClassCounts{1, 0, 1}));
    EXPECT_EQ(oracle::max_matching(gold, pred, MatchMode::Lenient), 1U);
    // Touching is not overlapping.
    const std::vector<PredictedSpan> touching{span(5, 6)};
    EXPECT_EQ(match_spans(gold, touching, MatchMode::Lenient)[SpanLabel::Disposition], (ClassCounts{0, 1, 2}));
}

TEST(MatchAssignment, ExactOffsetPreferredInGreedyPass) {
    const std::vector<PredictedSpan> gold{span(0, 6)};
    const std::vector<PredictedSpan> pred{span(0, 3), span(0, 6)};
    const auto a = match_assignment(gold, pred, MatchMode::Lenient);
    ASSERT_EQ(a.size(), 1U);
    EXPECT_EQ(a[0].second, 1U);
}

TEST(MatchAssignment, AugmentingRecoversWhatGreedyMisses) {
    // Gold (0,10) greedily grabs (1,4), which is the only partner of gold (2,3).
    const std::vector<PredictedSpan> gold{span(0, 10), span(2, 3)};
    const std::vector<PredictedSpan> pred{span(1, 4), span(8, 9)};
    EXPECT_EQ(match_assignment(gold, pred, MatchMode::Lenient, MatchOptions{false}).size(), 1U);
    EXPECT_EQ(match_assignment(gold, pred, MatchMode::Lenient).size(), 2U);
    EXPECT_EQ(oracle::max_matching(gold, pred, MatchMode::Lenient), 2U);
}

TEST(MatchSpans, AgreesWithExhaustiveMaximumMatching) {
    synth::Rng rng(37);
    for (int trial = 0; trial < 3000; ++trial) {
        const auto gold = synth::random_spans(rng, 7, 40);
        const auto pred = synth::random_spans(rng, 7, 40);
        for (const auto mode : {MatchMode::Strict, MatchMode::Lenient}) {
            const auto counts = match_spans(gold, pred, mode);
            std::size_t tp = 0;
            for (const auto l : class_universe(Task::Events)) {
                const auto &c = counts[l];
                tp += c.tp;
                std::vector<PredictedSpan> g;
                std::vector<PredictedSpan> p;
                for (const auto &s : gold) if (s.label == l) g.push_back(s);
                for (const auto &s : pred) if (s.label == l) p.push_back(s);
                ASSERT_EQ(c.tp + c.fn, g.size());
                ASSERT_EQ(c.tp + c.fp, p.size());
            }
            ASSERT_EQ(tp, oracle::max_matching(gold, pred, mode)) << "trial " << trial;
        }
    }
}

TEST(MatchSpans, LenientDominatesStrict) {
    synth::Rng rng(43);
    for (int trial = 0; trial < 3000; ++trial) {
        const auto gold = synth::random_spans(rng, 10, 50);
        const auto pred = synth::random_spans(rng, 10, 50);
        const auto strict = match_spans(gold, pred, MatchMode::Strict);
        const auto lenient = match_spans(gold, pred, MatchMode::Lenient);
        for (const auto l : class_universe(Task::Events)) {
            ASSERT_GE(lenient[l].tp, strict[l].tp);
        }
        ASSERT_GE(micro_metrics(lenient).f, micro_metrics(strict).f);
    }
}

TEST(MatchSpans, SelfMatchIsPerfect) {
    synth::Rng rng(47);
    for (int trial = 0; trial < 500; ++trial) {
        const auto spans = synth::random_spans(rng, 10, 50);
        for (const auto mode : {MatchMode::Strict, MatchMode::Lenient}) {
            const auto c = match_spans(spans, spans, mode);
            for (const auto l : class_universe(Task::Events)) {
                ASSERT_EQ(c[l].fp, 0U);
                ASSERT_EQ(c[l].fn, 0U);
            }
        }
    }
}

TEST(MatchSpans, EmptySides) {
    const std::vector<PredictedSpan> gold{span(0, 5), span(6, 9, SpanLabel::Undetermined)};
    const auto none = match_spans(gold, {}, MatchMode::Strict);
    EXPECT_EQ(none[SpanLabel::Disposition], (ClassCounts{0, 0, 1}));
    EXPECT_EQ(micro_metrics(none), (Prf{0, 0, 0}));
    const auto spurious = match_spans({}, gold, MatchMode::Lenient);
    EXPECT_EQ(spurious[SpanLabel::Undetermined], (ClassCounts{0, 1, 0}));
}

TEST(MatchSpans, UnsortedInputRejected) {
    const std::vector<PredictedSpan> unsorted{span(6, 9), span(0, 5)};
    const std::vector<PredictedSpan> sorted{span(0, 5)};
    try {
        match_spans(unsorted, sorted, MatchMode::Strict);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsortedInput);
    }
    EXPECT_THROW(match_spans(sorted, unsorted, MatchMode::Lenient), Error);
}

Corpus toy_corpus() {
    return Corpus{parse_document("a", synth::kToyText, synth::kToyAnn),
                  parse_document("b", "Continue insulin glargine, stop Lasix. Maybe aspirin",
                                 "T1\tNoDisposition 9 25\tinsulin glargine\nT2\tDisposition 32 37\tLasix\n"
                                 "T3\tUndetermined 45 52\taspirin\n")};
}

SpanMap gold_map(const Corpus &corpus) {
    SpanMap out;
    for (const auto &doc : corpus) out[doc.document.doc_id] = gold_spans(doc);
    return out;
}

TEST(Evaluate, SelfEvaluationIsPerfectForBothTasks) {
    const auto corpus = toy_corpus();
    for (const auto task : {Task::Events, Task::Medication}) {
        const auto [strict, lenient] = evaluate(corpus, gold_map(corpus), task, 2);
        for (const auto &r : {strict, lenient}) {
            EXPECT_EQ(r.micro, (Prf{1, 1, 1}));
            EXPECT_EQ(r.macro, (Prf{1, 1, 1}));
            EXPECT_EQ(r.task, task);
        }
        EXPECT_EQ(strict.mode, MatchMode::Strict);
    }
}

TEST(Evaluate, MissingPredictionsCountAsFalseNegatives) {
    const auto corpus = toy_corpus();
    auto pred = gold_map(corpus);
    pred.erase("b");
    const auto [strict, lenient] = evaluate(corpus, pred, Task::Events);
    EXPECT_DOUBLE_EQ(strict.micro.precision, 1.0);
    EXPECT_DOUBLE_EQ(strict.micro.recall, 0.25);
}

TEST(Evaluate, MedicationCollapsesAdjacentMentions) {
    // Two gold events "insulin" and "glargine" separated by a space become one drug mention.
    const Corpus corpus{parse_document("n", "insulin glargine", "T1\tDisposition 0 7\tinsulin\nT2\tNoDisposition 8 16\tglargine\n")};
    SpanMap pred;
    pred["n"] = {PredictedSpan{"n", 0, 16, SpanLabel::Undetermined}};
    const auto [strict, lenient] = evaluate(corpus, pred, Task::Medication);
    EXPECT_EQ(strict.classes.at(0).counts, (ClassCounts{1, 0, 0}));
    const auto events = evaluate(corpus, pred, Task::Events);
    EXPECT_EQ(events.first.micro.f, 0.0);
}

TEST(Evaluate, UnknownDocumentRejected) {
    const auto corpus = toy_corpus();
    auto pred = gold_map(corpus);
    pred["ghost"] = {};
    try {
        evaluate(corpus, pred, Task::Events);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownDocument);
    }
}

TEST(MetricsFile, RoundTripAndTable) {
    const auto corpus = toy_corpus();
    auto pred = gold_map(corpus);
    pred["a"].clear();
    const auto [strict, lenient] = evaluate(corpus, pred, Task::Events);
    const std::vector<MetricsReport> reports{strict, lenient};
    EXPECT_EQ(parse_metrics(serialize_metrics(reports)), reports);
    const auto table = format_metrics_table(reports);
    EXPECT_NE(table.find("Disposition"), std::string::npos);
    EXPECT_NE(table.find("0.7500"), std::string::npos);
}

}  // namespace
}  // namespace evoting
