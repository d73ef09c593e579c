#include "evoting/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <fmt/core.h>

namespace evoting {

std::string_view to_string(Strategy s) noexcept {
    switch (s) {
        case Strategy::Soft: return "soft";
        case Strategy::Hard: return "hard";
        case Strategy::Weighted: return "weighted";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) noexcept {
    if (name == "soft") return Strategy::Soft;
    if (name == "hard") return Strategy::Hard;
    if (name == "weighted") return Strategy::Weighted;
    return std::nullopt;
}

void EnsembleConfig::validate() const {
    if (members.empty()) {
        throw Error(ErrorCode::ConfigError, "ensemble needs at least one member");
    }
    if (strategy == Strategy::Weighted && !weights) {
        throw Error(ErrorCode::ConfigError, "weighted voting requires calibration reports");
    }
    if (strategy != Strategy::Weighted && weights) {
        throw Error(ErrorCode::ConfigError, "weights are only meaningful for weighted voting");
    }
    if (weights) {
        std::multiset<std::string> lhs(members.begin(), members.end());
        std::multiset<std::string> rhs;
        for (const auto &w : *weights) {
            rhs.insert(w.model_id);
        }
        if (lhs != rhs) {
            throw Error(ErrorCode::ConfigError, "weights do not cover exactly the ensemble members");
        }
        double total = 0.0;
        for (const auto &w : *weights) {
            total += w.weight;
        }
        if (std::abs(total - 1.0) > kProbabilityTolerance) {
            throw Error(ErrorCode::ConfigError, fmt::format("weights sum to {:.9f}, not 1", total));
        }
    }
}

namespace {

void check_members(std::span<const PredictionSet> members) {
    if (members.empty()) {
        throw Error(ErrorCode::EmptyEnsemble, "no member predictions");
    }
    const auto &ref = members.front();
    for (std::size_t m = 1; m < members.size(); ++m) {
        const auto &other = members[m];
        if (other.docs.size() != ref.docs.size()) {
            throw Error(ErrorCode::AlignmentError, "'" + other.model_id + "' covers " +
                                                       std::to_string(other.docs.size()) + " documents, '" +
                                                       ref.model_id + "' covers " + std::to_string(ref.docs.size()));
        }
        auto a = ref.docs.begin();
        auto b = other.docs.begin();
        for (; a != ref.docs.end(); ++a, ++b) {
            if (a->first != b->first || a->second.size() != b->second.size()) {
                throw Error(ErrorCode::AlignmentError, "'" + other.model_id + "' and '" + ref.model_id +
                                                           "' disagree on document '" + a->first + "'");
            }
            for (std::size_t i = 0; i < a->second.size(); ++i) {
                const auto &x = a->second[i];
                const auto &y = b->second[i];
                if (x.index != y.index || x.start != y.start || x.end != y.end) {
                    throw Error(ErrorCode::AlignmentError, "'" + other.model_id + "' and '" + ref.model_id +
                                                               "' disagree on token " + std::to_string(x.index) +
                                                               " of '" + a->first + "'");
                }
            }
        }
    }
}

/// Visits (doc_id, token position) and hands the member rows to `combine`.
template <typename Combine>
PredictionSet fuse(std::span<const PredictionSet> members, std::string model_id, Combine &&combine) {
    PredictionSet out;
    out.model_id = std::move(model_id);
    const auto &ref = members.front();
    std::vector<const std::vector<TokenProbs> *> member_rows(members.size());
    for (const auto &[doc_id, rows] : ref.docs) {
        for (std::size_t m = 0; m < members.size(); ++m) {
            member_rows[m] = &members[m].docs.at(doc_id);
        }
        auto &fused = out.docs[doc_id];
        fused.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            TokenProbs row{rows[i].index, rows[i].start, rows[i].end, {}};
            row.p = combine(member_rows, i);
            normalize_probs(row.p, out.model_id + " " + doc_id + " token " + std::to_string(rows[i].index));
            fused.push_back(row);
        }
    }
    return out;
}

double ordered_sum(std::vector<double> &terms) {
    std::sort(terms.begin(), terms.end());
    double sum = 0.0;
    for (const double t : terms) {
        sum += t;
    }
    return sum;
}

}  // namespace

PredictionSet soft_vote(std::span<const PredictionSet> members) {
    check_members(members);
    const auto m_count = static_cast<double>(members.size());
    std::vector<double> terms(members.size());
    return fuse(members, "ensemble:soft", [&](const auto &member_rows, std::size_t i) {
        Probs p{};
        for (std::size_t k = 0; k < kTagCount; ++k) {
            for (std::size_t m = 0; m < member_rows.size(); ++m) {
                terms[m] = (*member_rows[m])[i].p[k];
            }
            p[k] = ordered_sum(terms) / m_count;
        }
        return p;
    });
}

PredictionSet weighted_vote(std::span<const PredictionSet> members, const WeightVector &weights) {
    check_members(members);
    std::map<std::string, double> by_id;
    for (const auto &w : weights) {
        if (!std::isfinite(w.weight) || w.weight < 0.0) {
            throw Error(ErrorCode::WeightMismatch, "invalid weight for '" + w.model_id + "'");
        }
        if (!by_id.emplace(w.model_id, w.weight).second) {
            throw Error(ErrorCode::WeightMismatch, "duplicate weight for '" + w.model_id + "'");
        }
    }
    std::vector<double> member_weight;
    std::set<std::string> member_ids;
    for (const auto &m : members) {
        if (!member_ids.insert(m.model_id).second) {
            throw Error(ErrorCode::WeightMismatch, "member '" + m.model_id + "' appears twice");
        }
        const auto it = by_id.find(m.model_id);
        if (it == by_id.end()) {
            throw Error(ErrorCode::WeightMismatch, "no weight for member '" + m.model_id + "'");
        }
        member_weight.push_back(it->second);
    }
    if (by_id.size() != members.size()) {
        throw Error(ErrorCode::WeightMismatch, "weights name models that are not ensemble members");
    }
    std::vector<double> sorted_weights = member_weight;
    std::sort(sorted_weights.begin(), sorted_weights.end());
    const double total = std::accumulate(sorted_weights.begin(), sorted_weights.end(), 0.0);
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
        throw Error(ErrorCode::WeightMismatch, fmt::format("weights sum to {:.9f}, not 1", total));
    }
    std::vector<double> terms(members.size());
    return fuse(members, "ensemble:weighted", [&](const auto &member_rows, std::size_t i) {
        Probs p{};
        for (std::size_t k = 0; k < kTagCount; ++k) {
            for (std::size_t m = 0; m < member_rows.size(); ++m) {
                terms[m] = member_weight[m] * (*member_rows[m])[i].p[k];
            }
            p[k] = ordered_sum(terms);
        }
        return p;
    });
}

LabelSequence hard_vote(std::span<const PredictionSet> members) {
    check_members(members);
    LabelSequence out;
    out.model_id = "ensemble:hard";
    for (const auto &[doc_id, rows] : members.front().docs) {
        std::vector<const std::vector<TokenProbs> *> member_rows;
        for (const auto &m : members) {
            member_rows.push_back(&m.docs.at(doc_id));
        }
        auto &labels = out.docs[doc_id];
        labels.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::array<std::size_t, kTagCount> votes{};
            for (const auto *mr : member_rows) {
                ++votes[argmax((*mr)[i].p)];
            }
            const auto winner = static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
            labels.push_back(TokenLabel{rows[i].index, rows[i].start, rows[i].end, kTags[winner]});
        }
    }
    return out;
}

EnsembleResult run_ensemble(std::span<const PredictionSet> members, const EnsembleConfig &config) {
    config.validate();
    EnsembleResult result;
    switch (config.strategy) {
        case Strategy::Soft:
            result.probabilities = soft_vote(members);
            break;
        case Strategy::Weighted:
            result.probabilities = weighted_vote(members, *config.weights);
            break;
        case Strategy::Hard:
            result.labels = hard_vote(members);
            return result;
    }
    result.labels = argmax_labels(*result.probabilities);
    return result;
}

}  // namespace evoting
