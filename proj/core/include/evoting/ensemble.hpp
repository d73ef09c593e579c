#pragma once

#include "evoting/calibration.hpp"
#include "evoting/predictions.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evoting {

enum class Strategy { Soft, Hard, Weighted };

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view name) noexcept;

struct EnsembleConfig {
    Strategy strategy = Strategy::Soft;
    std::vector<std::string> members;     // model ids, in order
    std::optional<WeightVector> weights;  // required iff strategy == Weighted

    /// Throws ConfigError when the invariants above do not hold.
    void validate() const;
};

// All members must cover the same documents with the same token indices and offsets,
// otherwise AlignmentError. An empty member list raises EmptyEnsemble.
//
// Per-token sums are accumulated over the member contributions in sorted order, which makes
// every strategy exactly invariant to member order.

/// Mean of the member vectors; model_id "ensemble:soft".
PredictionSet soft_vote(std::span<const PredictionSet> members);

/// One vote per member for its argmax tag; plurality wins, ties go to the lowest tag index.
LabelSequence hard_vote(std::span<const PredictionSet> members);

/// Σ w_m p_m with weights looked up by model_id; model_id "ensemble:weighted".
/// Throws WeightMismatch unless the weights name exactly the member models.
PredictionSet weighted_vote(std::span<const PredictionSet> members, const WeightVector &weights);

struct EnsembleResult {
    std::optional<PredictionSet> probabilities;  // soft, weighted
    std::optional<LabelSequence> labels;         // always set
};

EnsembleResult run_ensemble(std::span<const PredictionSet> members, const EnsembleConfig &config);

}  // namespace evoting
