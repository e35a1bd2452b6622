// Acceptance suite: one test case and one printed PASS/FAIL line per criterion.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "segnoise/corrupt.hpp"
#include "segnoise/harness.hpp"
#include "segnoise/learner.hpp"
#include "segnoise/metrics.hpp"
#include "segnoise/rng.hpp"
#include "test_helpers.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace segnoise;
using testing::disk;
using testing::filled_rect;
using testing::random_mask;

namespace {

void report(int criterion, char const *label, bool pass) {
    std::printf("criterion %2d (%s): %s\n", criterion, label, pass ? "PASS" : "FAIL");
    std::fflush(stdout);
    CHECK_MESSAGE(pass, "criterion ", criterion, " failed: ", label);
}

double mean_of(std::vector<double> const &xs) {
    double s = 0.0;
    for (double x : xs) {
        s += x;
    }
    return s / static_cast<double>(xs.size());
}

/// Shared sweep for the trend criteria: clean baseline plus warp, shift, and
/// crop cells, default-size dataset, 3 repetitions.
ResultTable const &trend_table() {
    static ResultTable const table = [] {
        ExperimentConfig config;
        config.grid = {{"clean", "0", 0.0, NoOpSpec{}},
                       {"warp", "2", 2.0, WarpSpec{{3, 3, 2.0}}},
                       {"warp", "20", 20.0, WarpSpec{{3, 3, 20.0}}},
                       {"shift", "2", 2.0, ShiftSpec{2, 0}},
                       {"shift", "5", 5.0, ShiftSpec{5, 0}},
                       {"shift", "10", 10.0, ShiftSpec{10, 0}},
                       {"crop", "left", 0.0, CropLeftSpec{}},
                       {"crop", "rand_0.5", 1.0, CropRandSpec{0.5, 1.0}},
                       {"crop", "rand_0", 2.0, CropRandSpec{0.0, 1.0}}};
        return run(config);
    }();
    return table;
}

double cell_mean(ResultTable const &table, std::string const &family, std::string const &param) {
    std::vector<double> dice;
    for (auto const &row : table.rows) {
        if (row.experiment == family && row.param == param) {
            dice.push_back(row.dice);
        }
    }
    REQUIRE(!dice.empty());
    return mean_of(dice);
}

std::string slurp(std::filesystem::path const &path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("criterion 1: Dice oracle equivalence") {
    bool pass = true;
    CounterRng rng(SeedKey{101, 0, 0, 0});
    OverlapCounts pooled;
    OverlapCounts pooled_oracle;
    for (int pair = 0; pair < 200; ++pair) {
        int const w = 1 + static_cast<int>(rng.next_below(16));
        int const h = 1 + static_cast<int>(rng.next_below(16));
        Mask pred(w, h);
        Mask ref(w, h);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                pred.set(x, y, rng.next_unit() < 0.5);
                ref.set(x, y, rng.next_unit() < 0.5);
            }
        }
        // Brute-force pixel-counting oracle.
        std::uint64_t inter = 0, ptot = 0, rtot = 0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                inter += pred.at(x, y) && ref.at(x, y);
                ptot += pred.at(x, y);
                rtot += ref.at(x, y);
            }
        }
        OverlapCounts single;
        accumulate(single, pred, ref);
        double const oracle_dice =
            (ptot + rtot) == 0 ? 1.0 : 2.0 * static_cast<double>(inter) / (ptot + rtot);
        pass = pass && pooled_dice(single) == oracle_dice;
        pass = pass && single.intersection == inter && single.pred_total == ptot &&
               single.ref_total == rtot;
        accumulate(pooled, pred, ref);
        pooled_oracle.intersection += inter;
        pooled_oracle.pred_total += ptot;
        pooled_oracle.ref_total += rtot;
    }
    pass = pass && pooled_dice(pooled) ==
                       2.0 * static_cast<double>(pooled_oracle.intersection) /
                           static_cast<double>(pooled_oracle.pred_total +
                                               pooled_oracle.ref_total);
    report(1, "Dice oracle equivalence", pass);
}

TEST_CASE("criterion 2: gradient correctness") {
    bool pass = true;
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        CounterRng rng(SeedKey{200 + trial, 0, 0, 0});
        PatchScorer model = PatchScorer::zeros(2, 3);
        for (auto &w : model.weights) {
            w = rng.next_normal(0.3);
        }
        model.bias = rng.next_normal(0.3);
        MultiChannelImage img(6, 6, 2);
        for (int c = 0; c < 2; ++c) {
            for (int y = 0; y < 6; ++y) {
                for (int x = 0; x < 6; ++x) {
                    img.set(c, x, y, rng.next_normal(1.0));
                }
            }
        }
        Mask const target = random_mask(6, 6, 0.4, 900 + trial);
        auto const analytic = loss_and_param_gradient(model, img, target, 1.0);
        auto loss_at = [&](PatchScorer const &m) {
            return soft_dice_loss(forward(m, img), target, 1.0).loss;
        };
        double const h = 1e-6;
        for (std::size_t w = 0; w <= model.weights.size(); ++w) {
            PatchScorer plus = model;
            PatchScorer minus = model;
            double analytic_grad;
            if (w < model.weights.size()) {
                plus.weights[w] += h;
                minus.weights[w] -= h;
                analytic_grad = analytic.weights[w];
            } else {
                plus.bias += h;
                minus.bias -= h;
                analytic_grad = analytic.bias;
            }
            double const fd = (loss_at(plus) - loss_at(minus)) / (2.0 * h);
            if (std::abs(analytic_grad - fd) > 1e-4 * std::max(1e-7, std::abs(fd))) {
                pass = false;
            }
        }
    }
    report(2, "soft Dice + patch scorer gradients vs finite differences", pass);
}

TEST_CASE("criterion 3: warp unbiasedness on the disk phantom") {
    Mask const phantom = disk(64, 64, 32, 32, 15);
    auto const warp_report = estimate_bias(WarpSpec{{3, 3, 5.0}}, phantom, 500, 300);
    auto const shift_report = estimate_bias(ShiftSpec{10, 0}, phantom, 500, 300);
    bool const pass =
        warp_report.recovery_dice >= 0.95 && shift_report.recovery_dice < warp_report.recovery_dice;
    report(3, "warp recovery_dice >= 0.95 and above shift", pass);
}

TEST_CASE("criterion 4: half-area exactness of the crops") {
    bool pass = true;
    for (int trial = 0; trial < 100; ++trial) {
        Mask const m = random_mask(14, 12, 0.3 + 0.004 * trial, 400 + trial);
        std::uint64_t const a = area(m);
        if (area(crop_left(m)) != a - (a + 1) / 2) {
            pass = false;
        }
    }
    Mask const square = filled_rect(24, 24, 2, 2, 20, 20);
    double removed = 0.0;
    int const draws = 10000;
    double const total = static_cast<double>(area(square));
    for (std::uint32_t d = 0; d < static_cast<std::uint32_t>(draws); ++d) {
        removed +=
            (total - static_cast<double>(
                         area(crop_rand(square, 0.5, 1.0, SeedKey{401, d, 0, 0})))) /
            total;
    }
    double const mean_removed = removed / draws;
    pass = pass && std::abs(mean_removed - 0.5625) < 0.02;
    report(4, "crop_left exact halves; crop_rand mean removal 0.5625 +/- 0.02", pass);
}

TEST_CASE("criterion 5: crop trend (clean ~ rand_0 > rand_0.5 > left)") {
    auto const &table = trend_table();
    double const clean = cell_mean(table, "clean", "0");
    double const rand0 = cell_mean(table, "crop", "rand_0");
    double const rand05 = cell_mean(table, "crop", "rand_0.5");
    double const left = cell_mean(table, "crop", "left");
    std::printf("  crop means: clean=%.4f rand_0=%.4f rand_0.5=%.4f left=%.4f\n", clean,
                rand0, rand05, left);
    bool const pass = std::abs(clean - rand0) <= 0.03 && rand0 > rand05 && rand05 > left &&
                      clean - left >= 0.05;
    report(5, "crop ordering and gaps", pass);
}

TEST_CASE("criterion 6: shift trend (monotone decay, big drop at n=10)") {
    auto const &table = trend_table();
    std::vector<double> const means = {cell_mean(table, "clean", "0"),
                                       cell_mean(table, "shift", "2"),
                                       cell_mean(table, "shift", "5"),
                                       cell_mean(table, "shift", "10")};
    std::printf("  shift means: n=0 %.4f, n=2 %.4f, n=5 %.4f, n=10 %.4f\n", means[0],
                means[1], means[2], means[3]);
    int inversions = 0;
    double worst = 0.0;
    for (std::size_t i = 1; i < means.size(); ++i) {
        if (means[i] > means[i - 1]) {
            ++inversions;
            worst = std::max(worst, means[i] - means[i - 1]);
        }
    }
    bool const pass =
        (inversions == 0 || (inversions == 1 && worst <= 0.01)) && means[3] < means[0] - 0.05;
    report(6, "shift dice non-increasing and n=10 well below clean", pass);
}

TEST_CASE("criterion 7: warp robustness (sigma=2 harmless, sigma=20 milder than shift 10)") {
    auto const &table = trend_table();
    double const clean = cell_mean(table, "clean", "0");
    double const warp2 = cell_mean(table, "warp", "2");
    double const warp20 = cell_mean(table, "warp", "20");
    double const shift10 = cell_mean(table, "shift", "10");
    std::printf("  warp means: clean=%.4f sigma2=%.4f sigma20=%.4f shift10=%.4f\n", clean,
                warp2, warp20, shift10);
    bool const pass = std::abs(clean - warp2) <= 0.02 && (clean - warp20) < (clean - shift10);
    report(7, "warp sigma=2 within 0.02 of clean; sigma=20 drop < shift 10 drop", pass);
}

TEST_CASE("criterion 8: permutation worse than discarding") {
    // The gap between permuting and discarding only opens once the labeled set
    // is small enough that wrong-label gradients are not averaged away: permuting
    // a fraction f keeps the noisy samples in the loss (noise-to-signal grows as
    // 1/(1-f)) while discarding merely shrinks the sample count (1/sqrt(1-f)).
    // A 5% labeled subset of 200 samples puts the scorer in that regime.
    ExperimentConfig config;
    config.dataset_size = 200;
    config.train.labeled_fraction = 0.05;
    config.train.epochs = 30;
    config.train.learning_rate = 1.0;
    auto const table = permute_vs_discard(config, {0.25, 0.5});
    bool pass = true;
    for (auto const *fraction : {"0.25", "0.5"}) {
        double const permute = cell_mean(table, "permute", fraction);
        double const discard = cell_mean(table, "discard", fraction);
        std::printf("  fraction %s: permute=%.4f discard=%.4f\n", fraction, permute, discard);
        pass = pass && permute < discard;
    }
    report(8, "mean dice permute < discard at 0.25 and 0.5", pass);
}

TEST_CASE("criterion 9: byte-identical reruns") {
    ExperimentConfig config;
    config.dataset_size = 80;
    config.repetitions = 2;
    config.train.epochs = 5;
    config.experiment_seed = 900;
    config.grid = {{"clean", "0", 0.0, NoOpSpec{}},
                   {"warp", "5", 5.0, WarpSpec{{3, 3, 5.0}}},
                   {"shift", "5", 5.0, ShiftSpec{5, 0}}};
    auto const dir_a = std::filesystem::temp_directory_path() / "segnoise_acc_a";
    auto const dir_b = std::filesystem::temp_directory_path() / "segnoise_acc_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    emit(run(config), dir_a);
    emit(run(config), dir_b);
    bool pass = slurp(dir_a / "results.csv") == slurp(dir_b / "results.csv");
    for (auto const *family : {"clean", "warp", "shift"}) {
        pass = pass && slurp(dir_a / (std::string(family) + ".svg")) ==
                           slurp(dir_b / (std::string(family) + ".svg"));
    }
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    report(9, "same seed reproduces results.csv and SVG byte-for-byte", pass);
}

TEST_CASE("criterion 10: seed-invariance bias signature") {
    bool pass = true;
    Mask const phantom = disk(48, 48, 23, 24, 9);
    for (auto const &spec :
         {CorruptionSpec{ShiftSpec{6, -3}}, CorruptionSpec{CropLeftSpec{}}}) {
        Mask const first = apply(spec, phantom, SeedKey{0, 0, 0, 0});
        for (std::uint64_t s = 1; s < 10; ++s) {
            if (!(apply(spec, phantom, SeedKey{s, static_cast<std::uint32_t>(s),
                                               static_cast<std::uint32_t>(2 * s), 0}) ==
                  first)) {
                pass = false;
            }
        }
    }
    for (auto const &spec : {CorruptionSpec{WarpSpec{{3, 3, 2.0}}},
                             CorruptionSpec{CropRandSpec{0.5, 1.0}}}) {
        int different = 0;
        for (std::uint32_t trial = 0; trial < 100; ++trial) {
            Mask const m = disk(32, 32, 13.0 + trial % 7, 14.0 + trial % 5, 4.5);
            REQUIRE(area(m) >= 20);
            Mask const a = apply(spec, m, SeedKey{trial, 0, 1, 0});
            Mask const b = apply(spec, m, SeedKey{trial, 1, 1, 0});
            if (!(a == b)) {
                ++different;
            }
        }
        if (different < 99) {
            pass = false;
        }
    }
    report(10, "shift/crop_left seed-invariant; warp/crop_rand epoch-sensitive", pass);
}
