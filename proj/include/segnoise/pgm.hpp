#pragma once

#include "segnoise/grid.hpp"
#include "segnoise/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace segnoise {

/// Canonical binary PGM (P5): "P5\n<w> <h>\n<maxval>\n" + raster, no comments.
/// Readers accept any conforming P5 file, including comments.

/// 0 = background, 255 = foreground; any value >= 128 parses as foreground.
Mask read_mask_pgm(std::filesystem::path const &path);
void write_mask_pgm(std::filesystem::path const &path, Mask const &mask);

/// 16-bit PGM (maxval 65535, big-endian samples) of values in [0, 1],
/// scaled by 65535. Used for per-pixel frequency maps.
void write_frequency_pgm(std::filesystem::path const &path, std::vector<double> const &values,
                         int width, int height);

/// Raw 8-bit grey raster, used for image channels.
struct GreyImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> values;
};
GreyImage read_grey_pgm(std::filesystem::path const &path);
void write_grey_pgm(std::filesystem::path const &path, GreyImage const &image);

/// Dataset directory layout: manifest.json plus one PGM per channel and mask.
/// Channel intensities are quantized as round(offset + scale * value).
struct DatasetCodec {
    double intensity_offset = 64.0;
    double intensity_scale = 32.0;
};

void write_dataset(std::filesystem::path const &dir, std::vector<Sample> const &samples,
                   DatasetCodec const &codec = {});
std::vector<Sample> read_dataset(std::filesystem::path const &dir);

} // namespace segnoise
