#pragma once

// Reference implementations used only by tests. Each one is written from the definitions
// directly and shares no code path with the library routine it checks.

#include "evoting/metrics.hpp"
#include "evoting/predictions.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <vector>

namespace evoting::oracle {

inline bool overlaps(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
    // Some character position lies in both half-open intervals.
    for (std::size_t x = a0; x < a1; ++x) {
        if (x >= b0 && x < b1) {
            return true;
        }
    }
    return false;
}

inline bool candidate(const PredictedSpan &g, const PredictedSpan &p, MatchMode mode) {
    if (g.label != p.label) {
        return false;
    }
    return mode == MatchMode::Strict ? (g.start == p.start && g.end == p.end) : overlaps(g.start, g.end, p.start, p.end);
}

/// Maximum one-to-one matching size by exhaustive subset DP (pred side <= 20 spans).
inline std::size_t max_matching(const std::vector<PredictedSpan> &gold, const std::vector<PredictedSpan> &pred,
                                MatchMode mode) {
    const std::size_t full = std::size_t{1} << pred.size();
    // best[mask] = largest matching of the golds processed so far using exactly preds in mask
    std::vector<int> best(full, -1);
    best[0] = 0;
    for (const auto &g : gold) {
        auto next = best;
        for (std::size_t mask = 0; mask < full; ++mask) {
            if (best[mask] < 0) continue;
            for (std::size_t p = 0; p < pred.size(); ++p) {
                if ((mask >> p) & 1U) continue;
                if (!candidate(g, pred[p], mode)) continue;
                const auto m2 = mask | (std::size_t{1} << p);
                next[m2] = std::max(next[m2], best[mask] + 1);
            }
        }
        best = std::move(next);
    }
    return static_cast<std::size_t>(*std::max_element(best.begin(), best.end()));
}

/// ECE by scanning every bin over every token with the bin's own membership test.
inline double ece(const std::vector<double> &confidence, const std::vector<bool> &correct, std::size_t bins) {
    const auto n = static_cast<double>(confidence.size());
    double total = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double lo = static_cast<double>(b) / static_cast<double>(bins);
        const double hi = static_cast<double>(b + 1) / static_cast<double>(bins);
        double conf_sum = 0.0;
        double hits = 0.0;
        double count = 0.0;
        for (std::size_t i = 0; i < confidence.size(); ++i) {
            const double c = confidence[i];
            const bool in_bin = (c > lo && c <= hi) || (b == 0 && c == 0.0);
            if (in_bin) {
                conf_sum += c;
                hits += correct[i] ? 1.0 : 0.0;
                count += 1.0;
            }
        }
        if (count > 0) {
            total += (count / n) * std::abs(hits / count - conf_sum / count);
        }
    }
    return total;
}

/// Set of character positions covered by any span.
inline std::set<std::size_t> coverage(const std::vector<PredictedSpan> &spans) {
    std::set<std::size_t> out;
    for (const auto &s : spans) {
        for (std::size_t x = s.start; x < s.end; ++x) out.insert(x);
    }
    return out;
}

/// First index of the maximum by a plain scan.
inline std::size_t first_max(const Probs &p) {
    std::size_t best = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] > p[best]) best = k;
    }
    return best;
}

/// Per-token plurality with lowest-index tie-break, tallied from scratch.
inline std::size_t tally_vote(const std::vector<Probs> &member_vectors) {
    std::vector<int> votes(kTagCount, 0);
    for (const auto &p : member_vectors) {
        ++votes[first_max(p)];
    }
    std::size_t winner = 0;
    for (std::size_t k = 1; k < kTagCount; ++k) {
        if (votes[k] > votes[winner]) winner = k;
    }
    return winner;
}

}  // namespace evoting::oracle
