#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "segnoise/metrics.hpp"
#include "test_helpers.hpp"

#include <array>
#include <cmath>

using namespace segnoise;
using testing::disk;
using testing::filled_rect;
using testing::random_mask;

TEST_CASE("accumulate") {
    SUBCASE("identical masks") {
        Mask const m = filled_rect(8, 8, 1, 1, 5, 2);
        OverlapCounts counts;
        accumulate(counts, m, m);
        CHECK(counts.intersection == 10);
        CHECK(counts.pred_total == 10);
        CHECK(counts.ref_total == 10);
    }
    SUBCASE("disjoint masks") {
        Mask const a = filled_rect(8, 8, 0, 0, 2, 2);
        Mask const b = filled_rect(8, 8, 4, 4, 2, 3);
        OverlapCounts counts;
        accumulate(counts, a, b);
        CHECK(counts.intersection == 0);
        CHECK(counts.pred_total == 4);
        CHECK(counts.ref_total == 6);
    }
    SUBCASE("matches brute-force enumeration on random pairs") {
        for (int trial = 0; trial < 30; ++trial) {
            Mask const p = random_mask(8, 8, 0.5, 2 * trial);
            Mask const r = random_mask(8, 8, 0.5, 2 * trial + 1);
            OverlapCounts counts;
            accumulate(counts, p, r);
            std::uint64_t inter = 0, ptot = 0, rtot = 0;
            for (int y = 0; y < 8; ++y) {
                for (int x = 0; x < 8; ++x) {
                    inter += p.at(x, y) && r.at(x, y);
                    ptot += p.at(x, y);
                    rtot += r.at(x, y);
                }
            }
            CHECK(counts.intersection == inter);
            CHECK(counts.pred_total == ptot);
            CHECK(counts.ref_total == rtot);
        }
    }
    SUBCASE("dimension mismatch throws") {
        OverlapCounts counts;
        CHECK_THROWS_AS(accumulate(counts, Mask(4, 4), Mask(4, 5)), std::invalid_argument);
    }
    SUBCASE("accumulation order does not matter") {
        std::array<Mask, 4> masks = {random_mask(6, 6, 0.4, 50), random_mask(6, 6, 0.6, 51),
                                     random_mask(6, 6, 0.2, 52), random_mask(6, 6, 0.8, 53)};
        OverlapCounts forward_counts;
        OverlapCounts reverse_counts;
        accumulate(forward_counts, masks[0], masks[1]);
        accumulate(forward_counts, masks[2], masks[3]);
        accumulate(reverse_counts, masks[2], masks[3]);
        accumulate(reverse_counts, masks[0], masks[1]);
        CHECK(pooled_dice(forward_counts) == pooled_dice(reverse_counts));
    }
}

TEST_CASE("pooled_dice") {
    CHECK(pooled_dice({10, 10, 10}) == 1.0);
    CHECK(pooled_dice({0, 4, 6}) == 0.0);
    CHECK(pooled_dice({3, 5, 7}) == 0.5);
    CHECK(pooled_dice({0, 0, 0}) == 1.0); // both empty, defined as perfect
}

TEST_CASE("relative_performance") {
    SUBCASE("equal runs give ratio 1 and drop 0") {
        std::array<double, 3> const runs = {0.8, 0.85, 0.9};
        auto const rel = relative_performance(runs, runs);
        CHECK(rel.ratio == 1.0);
        CHECK(rel.percent_drop == 0.0);
    }
    SUBCASE("simple ratio") {
        std::array<double, 1> const d = {0.45};
        std::array<double, 1> const c = {0.90};
        auto const rel = relative_performance(d, c);
        CHECK(rel.ratio == doctest::Approx(0.5));
        CHECK(rel.variance == 0.0);
    }
    SUBCASE("variance matches the propagation formula recomputed independently") {
        std::array<double, 3> const d = {0.8, 0.82, 0.78};
        std::array<double, 3> const c = {0.9, 0.9, 0.9};
        auto const rel = relative_performance(d, c);
        // Oracle: recompute Var(d)/c^2 + d^2 Var(c)/c^4 from scratch.
        double const d_mean = (0.8 + 0.82 + 0.78) / 3.0;
        double d_var = 0.0;
        for (double v : d) {
            d_var += (v - d_mean) * (v - d_mean);
        }
        d_var /= 2.0;
        double const c_mean = 0.9;
        double const c_var = 0.0;
        double const expected = d_var / (c_mean * c_mean) +
                                d_mean * d_mean * c_var / std::pow(c_mean, 4);
        CHECK(rel.ratio == doctest::Approx(d_mean / c_mean));
        CHECK(rel.variance == doctest::Approx(expected));
    }
    SUBCASE("zero clean baseline is an error") {
        std::array<double, 1> const d = {0.5};
        std::array<double, 2> const c = {0.0, 0.0};
        CHECK_THROWS_AS(relative_performance(d, c), std::domain_error);
        CHECK_THROWS_AS(relative_performance(d, std::span<double const>{}),
                        std::invalid_argument);
    }
}

TEST_CASE("consensus_threshold resolves ties toward foreground") {
    std::vector<double> const freq = {0.5, 0.49999, 0.50001, 1.0};
    Mask const consensus = consensus_threshold(freq, 2, 2);
    CHECK(consensus.at(0, 0) == 1);
    CHECK(consensus.at(1, 0) == 0);
    CHECK(consensus.at(0, 1) == 1);
    CHECK(consensus.at(1, 1) == 1);
}

TEST_CASE("estimate_bias") {
    Mask const disk_mask = disk(64, 64, 32, 32, 15);
    SUBCASE("no-op recovers exactly") {
        auto const report = estimate_bias(NoOpSpec{}, disk_mask, 5, 1);
        CHECK(report.recovery_dice == 1.0);
        CHECK(report.l1_bias == 0.0);
    }
    SUBCASE("mask shifted fully off-canvas recovers nothing") {
        Mask const block = filled_rect(16, 16, 6, 6, 4, 4);
        auto const report = estimate_bias(ShiftSpec{20, 0}, block, 10, 1);
        CHECK(report.recovery_dice == 0.0);
    }
    SUBCASE("seed-invariant specs give a binary mean equal to the single output") {
        auto const report = estimate_bias(ShiftSpec{4, 2}, disk_mask, 7, 5);
        Mask const single = apply(ShiftSpec{4, 2}, disk_mask, SeedKey{5, 0, 0, 0});
        CHECK(report.consensus == single);
        for (double f : report.mean_mask) {
            CHECK((f == 0.0 || f == 1.0));
        }
    }
    SUBCASE("warp is nearly unbiased while shift is not") {
        Mask const phantom = disk(64, 64, 32, 32, 15);
        auto const warp_report = estimate_bias(WarpSpec{{3, 3, 5.0}}, phantom, 100, 7);
        auto const shift_report = estimate_bias(ShiftSpec{10, 0}, phantom, 100, 7);
        CHECK(warp_report.recovery_dice >= 0.9);
        CHECK(warp_report.recovery_dice > shift_report.recovery_dice);
    }
    SUBCASE("dataset-level specs and non-positive draws are rejected") {
        CHECK_THROWS_AS(estimate_bias(PermuteSpec{0.5}, disk_mask, 5, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(estimate_bias(NoOpSpec{}, disk_mask, 0, 1), std::invalid_argument);
    }
}
