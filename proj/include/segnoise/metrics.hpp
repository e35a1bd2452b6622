#pragma once

#include "segnoise/corrupt.hpp"
#include "segnoise/grid.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace segnoise {

/// Running intersection/total counts for pooled Dice over many mask pairs.
/// Accumulation is associative and commutative, so partial counts merge.
struct OverlapCounts {
    std::uint64_t intersection = 0;
    std::uint64_t pred_total = 0;
    std::uint64_t ref_total = 0;
};

void accumulate(OverlapCounts &counts, Mask const &pred, Mask const &ref);

/// 2*intersection / (pred_total + ref_total); 1.0 when both totals are 0.
double pooled_dice(OverlapCounts const &counts);

struct RelativePerformance {
    double ratio = 0.0;        // mean(corrupted) / mean(clean)
    double percent_drop = 0.0; // 100 * (1 - ratio)
    double variance = 0.0;     // first-order propagated variance of the ratio
};

RelativePerformance relative_performance(std::span<double const> dice_runs,
                                         std::span<double const> clean_runs);

/// Monte-Carlo estimate of how biased a corruption operator is on one mask.
struct BiasReport {
    int width = 0;
    int height = 0;
    std::vector<double> mean_mask; // per-pixel foreground frequency, row-major
    Mask consensus;                // mean thresholded at 1/2, ties to foreground
    double recovery_dice = 0.0;    // Dice(consensus, original)
    double l1_bias = 0.0;          // mean per-pixel |frequency - reference|
};

/// Threshold a frequency map at 1/2; frequency exactly 1/2 resolves to foreground.
Mask consensus_threshold(std::vector<double> const &frequency, int width, int height);

BiasReport estimate_bias(CorruptionSpec const &spec, Mask const &mask, int draws,
                         std::uint64_t base_seed);

} // namespace segnoise
