#include "evoting/metrics.hpp"

#include "evoting/parallel.hpp"
#include "records.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <limits>
#include <map>

namespace evoting {

std::string_view to_string(MatchMode mode) noexcept { return mode == MatchMode::Strict ? "strict" : "lenient"; }

std::string_view to_string(Task task) noexcept { return task == Task::Events ? "events" : "medication"; }

std::optional<MatchMode> parse_match_mode(std::string_view name) noexcept {
    if (name == "strict") return MatchMode::Strict;
    if (name == "lenient") return MatchMode::Lenient;
    return std::nullopt;
}

std::optional<Task> parse_task(std::string_view name) noexcept {
    if (name == "events") return Task::Events;
    if (name == "medication") return Task::Medication;
    return std::nullopt;
}

std::span<const SpanLabel> class_universe(Task task) noexcept {
    static constexpr std::array<SpanLabel, 3> kEvents{SpanLabel::Disposition, SpanLabel::NoDisposition,
                                                      SpanLabel::Undetermined};
    static constexpr std::array<SpanLabel, 1> kMedication{SpanLabel::Drug};
    if (task == Task::Events) {
        return kEvents;
    }
    return kMedication;
}

double f_score(double precision, double recall) noexcept {
    const double denom = precision + recall;
    return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

Prf prf(std::size_t tp, std::size_t fp, std::size_t fn) noexcept {
    const auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    Prf out;
    out.precision = ratio(tp, tp + fp);
    out.recall = ratio(tp, tp + fn);
    out.f = f_score(out.precision, out.recall);
    return out;
}

Prf micro_metrics(const MatchCounts &counts) noexcept {
    ClassCounts pooled;
    for (const auto &c : counts.by_label) {
        pooled += c;
    }
    return prf(pooled.tp, pooled.fp, pooled.fn);
}

Prf macro_metrics(const MatchCounts &counts, Task task) noexcept {
    const auto universe = class_universe(task);
    Prf sum;
    for (const auto label : universe) {
        const auto &c = counts[label];
        const auto s = prf(c.tp, c.fp, c.fn);
        sum.precision += s.precision;
        sum.recall += s.recall;
        sum.f += s.f;
    }
    const auto n = static_cast<double>(universe.size());
    return Prf{sum.precision / n, sum.recall / n, sum.f / n};
}

bool spans_match(const PredictedSpan &gold, const PredictedSpan &pred, MatchMode mode) noexcept {
    if (gold.label != pred.label) {
        return false;
    }
    if (mode == MatchMode::Strict) {
        return gold.start == pred.start && gold.end == pred.end;
    }
    return std::max(gold.start, pred.start) < std::min(gold.end, pred.end);
}

namespace {

constexpr auto kFree = std::numeric_limits<std::size_t>::max();

void require_sorted(std::span<const PredictedSpan> spans, std::string_view side) {
    for (std::size_t i = 1; i < spans.size(); ++i) {
        const auto &a = spans[i - 1];
        const auto &b = spans[i];
        if (b.start < a.start || (b.start == a.start && b.end < a.end)) {
            throw Error(ErrorCode::UnsortedInput, std::string(side) + " spans not sorted at position " +
                                                      std::to_string(i));
        }
    }
}

struct Matcher {
    const std::vector<std::vector<std::size_t>> &adjacency;
    std::vector<std::size_t> &pred_owner;
    std::vector<std::size_t> &gold_partner;
    std::vector<char> visited;

    bool augment(std::size_t g) {
        for (const auto p : adjacency[g]) {
            if (visited[p] != 0) {
                continue;
            }
            visited[p] = 1;
            if (pred_owner[p] == kFree || augment(pred_owner[p])) {
                pred_owner[p] = g;
                gold_partner[g] = p;
                return true;
            }
        }
        return false;
    }
};

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> match_assignment(std::span<const PredictedSpan> gold,
                                                                  std::span<const PredictedSpan> pred,
                                                                  MatchMode mode, MatchOptions options) {
    require_sorted(gold, "gold");
    require_sorted(pred, "predicted");

    std::vector<std::vector<std::size_t>> adjacency(gold.size());
    for (std::size_t g = 0; g < gold.size(); ++g) {
        for (std::size_t p = 0; p < pred.size(); ++p) {
            if (pred[p].start >= gold[g].end && mode == MatchMode::Lenient) {
                break;
            }
            if (spans_match(gold[g], pred[p], mode)) {
                adjacency[g].push_back(p);
            }
        }
    }

    std::vector<std::size_t> pred_owner(pred.size(), kFree);
    std::vector<std::size_t> gold_partner(gold.size(), kFree);
    for (std::size_t g = 0; g < gold.size(); ++g) {
        std::size_t choice = kFree;
        for (const auto p : adjacency[g]) {
            if (pred_owner[p] != kFree) {
                continue;
            }
            if (pred[p].start == gold[g].start && pred[p].end == gold[g].end) {
                choice = p;
                break;
            }
            if (choice == kFree) {
                choice = p;
            }
        }
        if (choice != kFree) {
            pred_owner[choice] = g;
            gold_partner[g] = choice;
        }
    }

    if (options.complete_to_maximum) {
        Matcher matcher{adjacency, pred_owner, gold_partner, std::vector<char>(pred.size(), 0)};
        for (std::size_t g = 0; g < gold.size(); ++g) {
            if (gold_partner[g] == kFree && !adjacency[g].empty()) {
                std::fill(matcher.visited.begin(), matcher.visited.end(), 0);
                matcher.augment(g);
            }
        }
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t g = 0; g < gold.size(); ++g) {
        if (gold_partner[g] != kFree) {
            pairs.emplace_back(g, gold_partner[g]);
        }
    }
    return pairs;
}

MatchCounts match_spans(std::span<const PredictedSpan> gold, std::span<const PredictedSpan> pred, MatchMode mode,
                        MatchOptions options) {
    const auto pairs = match_assignment(gold, pred, mode, options);
    MatchCounts counts;
    for (const auto &g : gold) {
        ++counts[g.label].fn;
    }
    for (const auto &p : pred) {
        ++counts[p.label].fp;
    }
    for (const auto &[g, p] : pairs) {
        auto &c = counts[gold[g].label];
        ++c.tp;
        --c.fn;
        --c.fp;
    }
    return counts;
}

MetricsReport make_report(const MatchCounts &counts, Task task, MatchMode mode) {
    MetricsReport report;
    report.task = task;
    report.mode = mode;
    for (const auto label : class_universe(task)) {
        const auto &c = counts[label];
        report.classes.push_back(ClassMetrics{label, c, prf(c.tp, c.fp, c.fn)});
    }
    report.micro = micro_metrics(counts);
    report.macro = macro_metrics(counts, task);
    return report;
}

std::pair<MetricsReport, MetricsReport> evaluate(const Corpus &gold, const SpanMap &predicted, Task task,
                                                 std::size_t jobs) {
    std::map<std::string_view, const AnnotatedDocument *> by_id;
    for (const auto &doc : gold) {
        by_id.emplace(doc.document.doc_id, &doc);
    }
    for (const auto &[doc_id, spans] : predicted) {
        if (!by_id.contains(doc_id)) {
            throw Error(ErrorCode::UnknownDocument, "predictions for '" + doc_id + "' have no gold document");
        }
    }

    std::vector<MatchCounts> strict(gold.size());
    std::vector<MatchCounts> lenient(gold.size());
    parallel_for(gold.size(), jobs, [&](std::size_t i) {
        const auto &doc = gold[i];
        auto gold_list = gold_spans(doc);
        const auto it = predicted.find(doc.document.doc_id);
        std::vector<PredictedSpan> pred_list;
        if (it != predicted.end()) {
            pred_list = it->second;
        }
        if (task == Task::Medication) {
            const std::u32string_view text = doc.document.text;
            gold_list = collapse_to_medication(gold_list, text);
            pred_list = collapse_to_medication(pred_list, text);
        }
        strict[i] = match_spans(gold_list, pred_list, MatchMode::Strict);
        lenient[i] = match_spans(gold_list, pred_list, MatchMode::Lenient);
    });

    MatchCounts strict_total;
    MatchCounts lenient_total;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        strict_total += strict[i];
        lenient_total += lenient[i];
    }
    return {make_report(strict_total, task, MatchMode::Strict), make_report(lenient_total, task, MatchMode::Lenient)};
}

namespace {

detail::json prf_json(const Prf &s) {
    return detail::json{{"precision", s.precision}, {"recall", s.recall}, {"f", s.f}};
}

Prf prf_from(const detail::json &j) {
    return Prf{j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f").get<double>()};
}

}  // namespace

std::string serialize_metrics(std::span<const MetricsReport> reports) {
    std::string out;
    for (const auto &r : reports) {
        detail::json classes = detail::json::array();
        for (const auto &c : r.classes) {
            auto entry = prf_json(c.scores);
            entry["label"] = std::string(to_string(c.label));
            entry["tp"] = c.counts.tp;
            entry["fp"] = c.counts.fp;
            entry["fn"] = c.counts.fn;
            classes.push_back(std::move(entry));
        }
        out += detail::to_line(detail::json{{"kind", "metrics"},
                                            {"task", std::string(to_string(r.task))},
                                            {"mode", std::string(to_string(r.mode))},
                                            {"classes", std::move(classes)},
                                            {"micro", prf_json(r.micro)},
                                            {"macro", prf_json(r.macro)}});
    }
    return out;
}

std::vector<MetricsReport> parse_metrics(std::string_view records, std::string_view source) {
    std::vector<MetricsReport> reports;
    for (const auto &r : detail::parse_records(records, source)) {
        MetricsReport report;
        const auto task = parse_task(detail::require<std::string>(r, "task", source));
        const auto mode = parse_match_mode(detail::require<std::string>(r, "mode", source));
        if (!task || !mode) {
            detail::schema_error(r, source, "unknown task or mode");
        }
        report.task = *task;
        report.mode = *mode;
        try {
            for (const auto &c : r.value.at("classes")) {
                const auto label = parse_span_label(c.at("label").get<std::string>());
                if (!label) {
                    detail::schema_error(r, source, "unknown class label");
                }
                report.classes.push_back(ClassMetrics{
                    *label,
                    ClassCounts{c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(),
                                c.at("fn").get<std::size_t>()},
                    prf_from(c)});
            }
            report.micro = prf_from(r.value.at("micro"));
            report.macro = prf_from(r.value.at("macro"));
        } catch (const nlohmann::json::exception &e) {
            detail::schema_error(r, source, e.what());
        }
        reports.push_back(std::move(report));
    }
    return reports;
}

std::string format_metrics_table(std::span<const MetricsReport> reports) {
    std::string out;
    for (const auto &r : reports) {
        out += fmt::format("== {} / {} ==\n", to_string(r.task), to_string(r.mode));
        out += fmt::format("{:<14} {:>6} {:>6} {:>6} {:>9} {:>9} {:>9}\n", "class", "TP", "FP", "FN", "precision",
                           "recall", "F");
        for (const auto &c : r.classes) {
            out += fmt::format("{:<14} {:>6} {:>6} {:>6} {:>9.4f} {:>9.4f} {:>9.4f}\n", to_string(c.label),
                               c.counts.tp, c.counts.fp, c.counts.fn, c.scores.precision, c.scores.recall,
                               c.scores.f);
        }
        out += fmt::format("{:<14} {:>6} {:>6} {:>6} {:>9.4f} {:>9.4f} {:>9.4f}\n", "micro", "", "", "",
                           r.micro.precision, r.micro.recall, r.micro.f);
        out += fmt::format("{:<14} {:>6} {:>6} {:>6} {:>9.4f} {:>9.4f} {:>9.4f}\n\n", "macro", "", "", "",
                           r.macro.precision, r.macro.recall, r.macro.f);
    }
    return out;
}

}  // namespace evoting
