#include "segnoise/grid.hpp"

#include <cmath>

namespace segnoise {

namespace {

void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("raster dimensions must be positive");
    }
}

} // namespace

Mask::Mask(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    if (fill > 1) {
        throw std::invalid_argument("mask fill value must be 0 or 1");
    }
    values_.assign(static_cast<std::size_t>(width) * height, fill);
}

Mask Mask::from_values(int width, int height, std::vector<std::uint8_t> values) {
    check_dims(width, height);
    if (values.size() != static_cast<std::size_t>(width) * height) {
        throw std::invalid_argument("mask value count does not match dimensions");
    }
    for (auto v : values) {
        if (v > 1) {
            throw std::invalid_argument("mask values must be 0 or 1");
        }
    }
    Mask m;
    m.width_ = width;
    m.height_ = height;
    m.values_ = std::move(values);
    return m;
}

MultiChannelImage::MultiChannelImage(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    check_dims(width, height);
    if (channels < 1) {
        throw std::invalid_argument("channel count must be >= 1");
    }
    values_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

DeformationField::DeformationField(int width, int height)
    : width_(width), height_(height) {
    check_dims(width, height);
    dx_.assign(static_cast<std::size_t>(width) * height, 0.0);
    dy_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

std::uint64_t area(Mask const &mask) {
    std::uint64_t count = 0;
    for (auto v : mask.values()) {
        count += v;
    }
    return count;
}

std::optional<BoundingBox> bounding_box(Mask const &mask) {
    int x0 = mask.width();
    int y0 = mask.height();
    int x1 = 0;
    int y1 = 0;
    bool any = false;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.at(x, y)) {
                any = true;
                x0 = std::min(x0, x);
                y0 = std::min(y0, y);
                x1 = std::max(x1, x + 1);
                y1 = std::max(y1, y + 1);
            }
        }
    }
    if (!any) {
        return std::nullopt;
    }
    return BoundingBox{x0, y0, x1, y1};
}

Mask translate(Mask const &mask, int dx, int dy) {
    Mask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            int const sx = x - dx;
            int const sy = y - dy;
            if (mask.in_bounds(sx, sy) && mask.at(sx, sy)) {
                out.set(x, y, true);
            }
        }
    }
    return out;
}

Mask warp_apply(Mask const &mask, DeformationField const &field) {
    if (field.width() != mask.width() || field.height() != mask.height()) {
        throw std::invalid_argument("deformation field dimensions do not match mask");
    }
    Mask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            int const sx = static_cast<int>(std::lround(x - field.dx(x, y)));
            int const sy = static_cast<int>(std::lround(y - field.dy(x, y)));
            if (mask.in_bounds(sx, sy) && mask.at(sx, sy)) {
                out.set(x, y, true);
            }
        }
    }
    return out;
}

} // namespace segnoise
