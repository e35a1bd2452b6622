#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace segnoise {

// Coordinate convention used throughout: x = column, y = row, origin top-left.

/// Half-open axis-aligned pixel box: [x0, x1) x [y0, y1).
struct BoundingBox {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    bool operator==(BoundingBox const &) const = default;
};

/// Binary 2D label raster. Values are exactly 0 (background) or 1 (foreground).
class Mask {
public:
    Mask() = default;
    Mask(int width, int height, std::uint8_t fill = 0);
    static Mask from_values(int width, int height, std::vector<std::uint8_t> values);

    int width() const { return width_; }
    int height() const { return height_; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }
    std::uint8_t at(int x, int y) const { return values_[index(x, y)]; }
    void set(int x, int y, bool foreground) {
        values_[index(x, y)] = foreground ? 1 : 0;
    }
    std::vector<std::uint8_t> const &values() const { return values_; }

    bool operator==(Mask const &) const = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> values_;
};

/// Real-valued 2D raster with C channels, stored channel-planar.
class MultiChannelImage {
public:
    MultiChannelImage() = default;
    MultiChannelImage(int width, int height, int channels, double fill = 0.0);

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    double at(int channel, int x, int y) const { return values_[index(channel, x, y)]; }
    void set(int channel, int x, int y, double value) { values_[index(channel, x, y)] = value; }
    std::vector<double> const &values() const { return values_; }

    bool operator==(MultiChannelImage const &) const = default;

private:
    std::size_t index(int channel, int x, int y) const {
        return (static_cast<std::size_t>(channel) * height_ + y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> values_;
};

/// Per-pixel 2D displacement in pixels.
class DeformationField {
public:
    DeformationField() = default;
    DeformationField(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    double dx(int x, int y) const { return dx_[index(x, y)]; }
    double dy(int x, int y) const { return dy_[index(x, y)]; }
    void set(int x, int y, double dx, double dy) {
        dx_[index(x, y)] = dx;
        dy_[index(x, y)] = dy;
    }

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * width_ + x;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> dx_;
    std::vector<double> dy_;
};

/// Number of foreground pixels.
std::uint64_t area(Mask const &mask);

/// Tightest box containing all foreground pixels; nullopt for an empty mask.
std::optional<BoundingBox> bounding_box(Mask const &mask);

/// Move foreground by (dx, dy); content shifted off-canvas is dropped.
Mask translate(Mask const &mask, int dx, int dy);

/// Backward warp with nearest-neighbor sampling: output pixel p reads the
/// input pixel nearest to p - displacement(p); out-of-bounds reads are 0.
Mask warp_apply(Mask const &mask, DeformationField const &field);

} // namespace segnoise
