#pragma once

#include "segnoise/grid.hpp"
#include "segnoise/rng.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace segnoise {

/// Random ellipse lesion on a noisy multi-channel canvas.
struct SynthConfig {
    int width = 64;
    int height = 64;
    int channels = 4;
    double axis_min = 5.0;
    double axis_max = 14.0;
    std::vector<double> lesion_offsets = {2.0, 1.5, -1.0, 1.0}; // per channel
    double background_noise_std = 1.0;
    double texture_noise_std = 0.5;
    double healthy_fraction = 0.25; // images with no lesion

    bool operator==(SynthConfig const &) const = default;
};

nlohmann::json synth_config_to_json(SynthConfig const &config);
SynthConfig synth_config_from_json(nlohmann::json const &j);

struct EllipseParams {
    double cx = 0.0;
    double cy = 0.0;
    double axis_a = 0.0;
    double axis_b = 0.0;
    double theta = 0.0; // rotation, radians
};

struct Sample {
    int id = 0;
    MultiChannelImage image;
    Mask mask; // empty for healthy samples
};

/// A pixel is foreground iff its center satisfies the ellipse inequality.
Mask rasterize_ellipse(EllipseParams const &ellipse, int width, int height);

/// Deterministic in seed; per-sample randomness keyed by (seed, sample index).
std::vector<Sample> generate(SynthConfig const &config, int n, std::uint64_t seed);

} // namespace segnoise
