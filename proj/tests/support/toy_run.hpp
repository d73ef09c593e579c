#pragma once

// Writes a small synthetic corpus plus noisy member prediction files to disk, for end-to-end runs.

#include "evoting/pipeline.hpp"

#include "synthetic.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace evoting::synth {

struct ToyRun {
    std::filesystem::path text_dir;
    std::filesystem::path ann_dir;
    std::vector<std::filesystem::path> predictions;
    std::filesystem::path calibration;
};

/// Member m puts `1 - noise[m]`-ish mass on the gold tag and otherwise picks a random tag.
inline ToyRun write_toy_run(const std::filesystem::path &root, std::size_t docs, const std::vector<double> &noise,
                            std::uint64_t seed) {
    Rng rng(seed);
    ToyRun run{root / "txt", root / "ann", {}, root / "calibration.jsonl"};
    Corpus corpus;
    for (std::size_t d = 0; d < docs; ++d) {
        const auto doc = random_aligned_doc(rng, "note" + std::to_string(d));
        AnnotatedDocument ad{doc.document, doc.gold};
        write_text(run.text_dir / (ad.document.doc_id + ".txt"), encode_utf8(ad.document.text));
        write_text(run.ann_dir / (ad.document.doc_id + ".ann"), serialize_annotations(ad));
        corpus.push_back(std::move(ad));
    }
    const auto tagged = tag_corpus(corpus, Stoplist{}, 1);
    std::vector<CalibrationReport> reports;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> any_tag(0, kTagCount - 1);
    for (std::size_t m = 0; m < noise.size(); ++m) {
        PredictionSet set;
        set.model_id = "member" + std::to_string(m);
        for (const auto &doc : tagged) {
            auto &rows = set.docs[doc.doc_id];
            for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
                const auto top = u(rng) < noise[m] ? any_tag(rng) : tag_index(doc.tags[i]);
                auto p = random_probs(rng);
                p[top] += 2.0;
                for (auto &v : p) v /= 3.0;
                rows.push_back(TokenProbs{i, doc.tokens[i].start, doc.tokens[i].end, p});
            }
        }
        run.predictions.push_back(root / ("member" + std::to_string(m) + ".jsonl"));
        write_text(run.predictions.back(), serialize_predictions(set));
        CalibrationReport r;
        r.model_id = set.model_id;
        r.ece = std::min(0.9, noise[m] + 0.05);
        reports.push_back(r);
    }
    write_text(run.calibration, serialize_calibration(reports));
    return run;
}

inline RunConfig toy_config(const ToyRun &run, Strategy strategy, const std::filesystem::path &out) {
    RunConfig c;
    c.text_dir = run.text_dir;
    c.ann_dir = run.ann_dir;
    c.predictions = run.predictions;
    c.strategy = strategy;
    if (strategy == Strategy::Weighted) c.calibration_reports = {run.calibration};
    c.output_dir = out;
    c.jobs = 2;
    return c;
}

}  // namespace evoting::synth
