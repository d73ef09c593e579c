#include "evoting/calibration.hpp"
#include "evoting/ensemble.hpp"
#include "evoting/metrics.hpp"
#include "evoting/span_decode.hpp"

#include "synthetic.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace evoting;

void BM_MatchSpans(benchmark::State &state) {
    synth::Rng rng(1);
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto gold = synth::random_spans(rng, n, n * 8);
    const auto pred = synth::random_spans(rng, n, n * 8);
    const auto mode = state.range(1) == 0 ? MatchMode::Strict : MatchMode::Lenient;
    for (auto _ : state) {
        benchmark::DoNotOptimize(match_spans(gold, pred, mode));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(gold.size() + pred.size()));
}
BENCHMARK(BM_MatchSpans)->ArgsProduct({{16, 256, 4096}, {0, 1}});

std::vector<PredictionSet> members(std::size_t count, std::size_t tokens) {
    synth::Rng rng(2);
    const auto layout = synth::make_layout(tokens / 1000, 1000);
    std::vector<PredictionSet> out;
    for (std::size_t m = 0; m < count; ++m) out.push_back(synth::random_set(rng, "m" + std::to_string(m), layout));
    return out;
}

void BM_SoftVote(benchmark::State &state) {
    const auto sets = members(static_cast<std::size_t>(state.range(0)), 20000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(soft_vote(sets));
    }
    state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_SoftVote)->Arg(3)->Arg(11);

void BM_HardVote(benchmark::State &state) {
    const auto sets = members(static_cast<std::size_t>(state.range(0)), 20000);
    for (auto _ : state) {
        benchmark::DoNotOptimize(hard_vote(sets));
    }
    state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_HardVote)->Arg(3)->Arg(11);

void BM_WeightedVote(benchmark::State &state) {
    const auto count = static_cast<std::size_t>(state.range(0));
    const auto sets = members(count, 20000);
    WeightVector w;
    for (std::size_t m = 0; m < count; ++m) w.push_back({"m" + std::to_string(m), 1.0 / static_cast<double>(count)});
    for (auto _ : state) {
        benchmark::DoNotOptimize(weighted_vote(sets, w));
    }
    state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_WeightedVote)->Arg(3)->Arg(11);

void BM_ComputeEce(benchmark::State &state) {
    synth::Rng rng(3);
    const auto sample = synth::calibrated_predictor(rng, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_ece(sample.pred, sample.gold, 10));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ComputeEce)->Arg(10000)->Arg(100000);

}  // namespace

// The packaged benchmark_main archive is LTO bytecode from a different compiler release.
BENCHMARK_MAIN();
