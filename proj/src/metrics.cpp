#include "segnoise/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace segnoise {

namespace {

double mean_of(std::span<double const> xs) {
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    return s / static_cast<double>(xs.size());
}

/// Unbiased sample variance; 0 for a single run.
double variance_of(std::span<double const> xs, double mean) {
    if (xs.size() < 2) {
        return 0.0;
    }
    double s = 0.0;
    for (double x : xs) {
        s += (x - mean) * (x - mean);
    }
    return s / static_cast<double>(xs.size() - 1);
}

} // namespace

void accumulate(OverlapCounts &counts, Mask const &pred, Mask const &ref) {
    if (pred.width() != ref.width() || pred.height() != ref.height()) {
        throw std::invalid_argument("prediction and reference dimensions differ");
    }
    auto const &p = pred.values();
    auto const &r = ref.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        counts.intersection += p[i] & r[i];
        counts.pred_total += p[i];
        counts.ref_total += r[i];
    }
}

double pooled_dice(OverlapCounts const &counts) {
    std::uint64_t const denom = counts.pred_total + counts.ref_total;
    if (denom == 0) {
        return 1.0;
    }
    return 2.0 * static_cast<double>(counts.intersection) / static_cast<double>(denom);
}

RelativePerformance relative_performance(std::span<double const> dice_runs,
                                         std::span<double const> clean_runs) {
    if (dice_runs.empty() || clean_runs.empty()) {
        throw std::invalid_argument("relative_performance requires non-empty run lists");
    }
    double const d_mean = mean_of(dice_runs);
    double const c_mean = mean_of(clean_runs);
    if (c_mean <= 0.0) {
        throw std::domain_error("clean baseline mean is zero; relative performance undefined");
    }
    double const d_var = variance_of(dice_runs, d_mean);
    double const c_var = variance_of(clean_runs, c_mean);
    RelativePerformance out;
    out.ratio = d_mean / c_mean;
    out.percent_drop = 100.0 * (1.0 - out.ratio);
    // Delta method for a ratio of independent means.
    out.variance = d_var / (c_mean * c_mean) +
                   d_mean * d_mean * c_var / (c_mean * c_mean * c_mean * c_mean);
    return out;
}

Mask consensus_threshold(std::vector<double> const &frequency, int width, int height) {
    if (frequency.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("frequency map size does not match dimensions");
    }
    Mask out(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (frequency[static_cast<std::size_t>(y) * width + x] >= 0.5) {
                out.set(x, y, true);
            }
        }
    }
    return out;
}

BiasReport estimate_bias(CorruptionSpec const &spec, Mask const &mask, int draws,
                         std::uint64_t base_seed) {
    if (draws < 1) {
        throw std::invalid_argument("estimate_bias requires draws >= 1");
    }
    if (is_dataset_level(spec)) {
        throw std::invalid_argument("estimate_bias takes per-mask corruptions only");
    }
    std::size_t const n = mask.values().size();
    std::vector<std::uint64_t> hits(n, 0);
    for (int d = 0; d < draws; ++d) {
        SeedKey key;
        key.experiment_seed = base_seed;
        key.epoch = static_cast<std::uint32_t>(d);
        key.op_tag = op_tags::bias_draw;
        Mask const corrupted = apply(spec, mask, key);
        auto const &v = corrupted.values();
        for (std::size_t i = 0; i < n; ++i) {
            hits[i] += v[i];
        }
    }
    BiasReport report;
    report.width = mask.width();
    report.height = mask.height();
    report.mean_mask.resize(n);
    double l1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        report.mean_mask[i] = static_cast<double>(hits[i]) / draws;
        l1 += std::abs(report.mean_mask[i] - mask.values()[i]);
    }
    report.l1_bias = l1 / static_cast<double>(n);
    report.consensus = consensus_threshold(report.mean_mask, mask.width(), mask.height());
    OverlapCounts counts;
    accumulate(counts, report.consensus, mask);
    report.recovery_dice = pooled_dice(counts);
    return report;
}

} // namespace segnoise
