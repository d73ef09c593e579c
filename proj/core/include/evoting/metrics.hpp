#pragma once

#include "evoting/labels.hpp"
#include "evoting/span_decode.hpp"
#include "evoting/standoff.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace evoting {

enum class MatchMode { Strict, Lenient };
enum class Task { Events, Medication };

std::string_view to_string(MatchMode mode) noexcept;
std::string_view to_string(Task task) noexcept;
std::optional<MatchMode> parse_match_mode(std::string_view name) noexcept;
std::optional<Task> parse_task(std::string_view name) noexcept;

/// Fixed class universe of a task: the three event classes, or {Drug}.
std::span<const SpanLabel> class_universe(Task task) noexcept;

struct ClassCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    ClassCounts &operator+=(const ClassCounts &o) noexcept {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    bool operator==(const ClassCounts &) const = default;
};

struct MatchCounts {
    std::array<ClassCounts, kSpanLabelCount> by_label{};

    [[nodiscard]] const ClassCounts &operator[](SpanLabel l) const noexcept {
        return by_label[static_cast<std::size_t>(l)];
    }
    ClassCounts &operator[](SpanLabel l) noexcept { return by_label[static_cast<std::size_t>(l)]; }

    MatchCounts &operator+=(const MatchCounts &o) noexcept {
        for (std::size_t i = 0; i < kSpanLabelCount; ++i) {
            by_label[i] += o.by_label[i];
        }
        return *this;
    }
    bool operator==(const MatchCounts &) const = default;
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;

    bool operator==(const Prf &) const = default;
};

/// 2PR / (P + R), with 0 when P + R = 0.
double f_score(double precision, double recall) noexcept;
/// P = tp/(tp+fp), R = tp/(tp+fn); every 0/0 is 0.
Prf prf(std::size_t tp, std::size_t fp, std::size_t fn) noexcept;

/// Pools TP/FP/FN across all labels before applying prf.
Prf micro_metrics(const MatchCounts &counts) noexcept;
/// Unweighted per-class means of the scores over the fixed universe of `task`.
Prf macro_metrics(const MatchCounts &counts, Task task) noexcept;

/// Whether a gold/prediction pair is a candidate under `mode` (labels must agree).
bool spans_match(const PredictedSpan &gold, const PredictedSpan &pred, MatchMode mode) noexcept;

struct MatchOptions {
    /// After the greedy pass, extend the assignment along augmenting paths to a maximum
    /// one-to-one matching. Turning this off exposes the bare greedy pass.
    bool complete_to_maximum = true;
};

/// One-to-one assignment as (gold index, prediction index) pairs, sorted by gold index.
/// Greedy pass: gold spans in (start, end) order each take an exact-offset prediction if one
/// is free, otherwise the first free matching prediction in (start, end) order.
/// Throws UnsortedInput when either list is not sorted by (start, end).
std::vector<std::pair<std::size_t, std::size_t>> match_assignment(std::span<const PredictedSpan> gold,
                                                                  std::span<const PredictedSpan> pred,
                                                                  MatchMode mode, MatchOptions options = {});

MatchCounts match_spans(std::span<const PredictedSpan> gold, std::span<const PredictedSpan> pred, MatchMode mode,
                        MatchOptions options = {});

struct ClassMetrics {
    SpanLabel label = SpanLabel::Disposition;
    ClassCounts counts;
    Prf scores;

    bool operator==(const ClassMetrics &) const = default;
};

struct MetricsReport {
    Task task = Task::Events;
    MatchMode mode = MatchMode::Strict;
    std::vector<ClassMetrics> classes;  // the task's class universe, canonical order
    Prf micro;
    Prf macro;

    bool operator==(const MetricsReport &) const = default;
};

MetricsReport make_report(const MatchCounts &counts, Task task, MatchMode mode);

/// Strict and lenient reports from per-document counts summed over the corpus. For the
/// medication task both sides are collapsed first. Gold documents without predictions count
/// as all-FN; predictions for unknown documents raise UnknownDocument.
std::pair<MetricsReport, MetricsReport> evaluate(const Corpus &gold, const SpanMap &predicted, Task task,
                                                 std::size_t jobs = 1);

/// One JSON record per report, full precision.
std::string serialize_metrics(std::span<const MetricsReport> reports);
std::vector<MetricsReport> parse_metrics(std::string_view records, std::string_view source = "metrics file");
/// Human-readable table, four decimals.
std::string format_metrics_table(std::span<const MetricsReport> reports);

}  // namespace evoting
