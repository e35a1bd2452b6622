#include "segnoise/synth.hpp"

#include <cmath>
#include <stdexcept>

namespace segnoise {

namespace {

void validate(SynthConfig const &config) {
    if (config.width <= 0 || config.height <= 0 || config.channels < 1) {
        throw std::invalid_argument("synth canvas dimensions and channels must be positive");
    }
    if (config.lesion_offsets.size() != static_cast<std::size_t>(config.channels)) {
        throw std::invalid_argument("lesion_offsets must have one entry per channel");
    }
    if (!(config.axis_min > 0.0 && config.axis_min <= config.axis_max)) {
        throw std::invalid_argument("lesion axis range must satisfy 0 < min <= max");
    }
    if (2.0 * config.axis_max >= std::min(config.width, config.height)) {
        throw std::invalid_argument("lesion axis range exceeds canvas");
    }
    if (config.background_noise_std < 0.0 || config.texture_noise_std < 0.0) {
        throw std::invalid_argument("noise standard deviations must be >= 0");
    }
    if (!(config.healthy_fraction >= 0.0 && config.healthy_fraction <= 1.0)) {
        throw std::invalid_argument("healthy_fraction must lie in [0, 1]");
    }
}

} // namespace

nlohmann::json synth_config_to_json(SynthConfig const &c) {
    return nlohmann::json{{"width", c.width},
                          {"height", c.height},
                          {"channels", c.channels},
                          {"axis_min", c.axis_min},
                          {"axis_max", c.axis_max},
                          {"lesion_offsets", c.lesion_offsets},
                          {"background_noise_std", c.background_noise_std},
                          {"texture_noise_std", c.texture_noise_std},
                          {"healthy_fraction", c.healthy_fraction}};
}

SynthConfig synth_config_from_json(nlohmann::json const &j) {
    SynthConfig c;
    c.width = j.value("width", c.width);
    c.height = j.value("height", c.height);
    c.channels = j.value("channels", c.channels);
    c.axis_min = j.value("axis_min", c.axis_min);
    c.axis_max = j.value("axis_max", c.axis_max);
    c.lesion_offsets = j.value("lesion_offsets", c.lesion_offsets);
    c.background_noise_std = j.value("background_noise_std", c.background_noise_std);
    c.texture_noise_std = j.value("texture_noise_std", c.texture_noise_std);
    c.healthy_fraction = j.value("healthy_fraction", c.healthy_fraction);
    validate(c);
    return c;
}

Mask rasterize_ellipse(EllipseParams const &e, int width, int height) {
    Mask mask(width, height);
    double const cos_t = std::cos(e.theta);
    double const sin_t = std::sin(e.theta);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double const dx = x - e.cx;
            double const dy = y - e.cy;
            double const u = (dx * cos_t + dy * sin_t) / e.axis_a;
            double const v = (-dx * sin_t + dy * cos_t) / e.axis_b;
            if (u * u + v * v <= 1.0) {
                mask.set(x, y, true);
            }
        }
    }
    return mask;
}

std::vector<Sample> generate(SynthConfig const &config, int n, std::uint64_t seed) {
    validate(config);
    if (n < 1) {
        throw std::invalid_argument("sample count must be >= 1");
    }
    std::vector<Sample> samples;
    samples.reserve(n);
    for (int id = 0; id < n; ++id) {
        SeedKey key;
        key.experiment_seed = seed;
        key.sample_id = static_cast<std::uint32_t>(id);
        key.op_tag = op_tags::synth_sample;
        CounterRng rng(key);

        Sample sample;
        sample.id = id;
        bool const healthy = rng.next_unit() < config.healthy_fraction;
        if (healthy) {
            sample.mask = Mask(config.width, config.height);
        } else {
            EllipseParams e;
            e.axis_a = config.axis_min + rng.next_unit() * (config.axis_max - config.axis_min);
            e.axis_b = config.axis_min + rng.next_unit() * (config.axis_max - config.axis_min);
            e.theta = rng.next_unit() * 3.14159265358979323846;
            double const r = std::max(e.axis_a, e.axis_b);
            e.cx = r + rng.next_unit() * (config.width - 1 - 2.0 * r);
            e.cy = r + rng.next_unit() * (config.height - 1 - 2.0 * r);
            sample.mask = rasterize_ellipse(e, config.width, config.height);
        }

        sample.image = MultiChannelImage(config.width, config.height, config.channels);
        for (int c = 0; c < config.channels; ++c) {
            for (int y = 0; y < config.height; ++y) {
                for (int x = 0; x < config.width; ++x) {
                    double v = rng.next_normal(config.background_noise_std);
                    if (sample.mask.at(x, y)) {
                        v += config.lesion_offsets[c];
                    }
                    v += rng.next_normal(config.texture_noise_std);
                    sample.image.set(c, x, y, v);
                }
            }
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

} // namespace segnoise
