#pragma once

#include "segnoise/grid.hpp"
#include "segnoise/rng.hpp"
#include "segnoise/synth.hpp"

#include <cstdint>

namespace segnoise::testing {

inline Mask filled_rect(int width, int height, int x0, int y0, int w, int h) {
    Mask mask(width, height);
    for (int y = y0; y < y0 + h; ++y) {
        for (int x = x0; x < x0 + w; ++x) {
            mask.set(x, y, true);
        }
    }
    return mask;
}

inline Mask disk(int width, int height, double cx, double cy, double radius) {
    return rasterize_ellipse(EllipseParams{cx, cy, radius, radius, 0.0}, width, height);
}

inline Mask random_mask(int width, int height, double density, std::uint64_t seed) {
    CounterRng rng(SeedKey{seed, 0, 0, 99});
    Mask mask(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            mask.set(x, y, rng.next_unit() < density);
        }
    }
    return mask;
}

} // namespace segnoise::testing
