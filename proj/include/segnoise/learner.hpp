#pragma once

#include "segnoise/corrupt.hpp"
#include "segnoise/grid.hpp"
#include "segnoise/synth.hpp"

#include <filesystem>
#include <span>
#include <vector>

namespace segnoise {

/// Linear per-pixel scorer over a k x k multi-channel patch, squashed by a
/// logistic. Deliberately shallow: the label-noise asymmetry under study
/// lives in the training targets, not the architecture.
struct PatchScorer {
    int patch_size = 5; // odd
    int channels = 1;
    std::vector<double> weights; // channels * patch_size^2, row-major per channel
    double bias = 0.0;

    static PatchScorer zeros(int channels, int patch_size = 5);
    bool operator==(PatchScorer const &) const = default;
};

struct TrainConfig {
    int epochs = 12;
    double learning_rate = 2.0;
    int batch_size = 8;
    double smoothing_eps = 1.0;
    double labeled_fraction = 1.0;
    std::uint64_t seed = 0;
    int patch_size = 5;
};

nlohmann::json train_config_to_json(TrainConfig const &config);
TrainConfig train_config_from_json(nlohmann::json const &j);

/// Per-pixel foreground probabilities, row-major. Borders are zero-padded.
std::vector<double> forward(PatchScorer const &model, MultiChannelImage const &image);

struct SoftDice {
    double loss = 0.0;
    std::vector<double> grad; // d loss / d prob, per pixel
};

/// loss = 1 - (2*sum(p*g) + eps) / (sum(p) + sum(g) + eps), with analytic gradient.
SoftDice soft_dice_loss(std::span<double const> probs, Mask const &mask, double eps);

struct ParamGradient {
    double loss = 0.0;
    std::vector<double> weights; // same layout as PatchScorer::weights
    double bias = 0.0;
};

/// Soft Dice loss of one sample with its analytic gradient chained through
/// the logistic and the patch response.
ParamGradient loss_and_param_gradient(PatchScorer const &model, MultiChannelImage const &image,
                                      Mask const &target, double eps);

struct TrainResult {
    PatchScorer model;
    std::vector<double> epoch_loss; // mean per-sample loss per epoch
};

/// Mini-batch gradient descent on the soft Dice loss. Every epoch re-corrupts
/// each mask from its pristine reference; Permute/Discard are resolved once
/// before epoch 0. Deterministic in the config seed.
TrainResult train(std::vector<Sample> const &dataset, CorruptionSpec const &spec,
                  TrainConfig const &config);

/// Hard prediction: probability >= 1/2.
Mask predict_mask(PatchScorer const &model, MultiChannelImage const &image);

/// Pooled Dice of hard predictions against the clean masks.
double evaluate_pooled_dice(PatchScorer const &model, std::span<Sample const> samples);

void save_model(std::filesystem::path const &path, PatchScorer const &model);
PatchScorer load_model(std::filesystem::path const &path);

} // namespace segnoise
