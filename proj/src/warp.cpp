#include "segnoise/warp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace segnoise {

namespace {

void check_params(WarpParams const &params) {
    if (params.grid_rows < 2 || params.grid_cols < 2) {
        throw std::invalid_argument("control grid must be at least 2x2");
    }
    if (params.sigma < 0.0) {
        throw std::invalid_argument("sigma must be >= 0");
    }
}

/// Uniform cubic B-spline basis, support |t| < 2.
double cubic_bspline(double t) {
    t = std::abs(t);
    if (t < 1.0) {
        return (4.0 - 6.0 * t * t + 3.0 * t * t * t) / 6.0;
    }
    if (t < 2.0) {
        double const u = 2.0 - t;
        return u * u * u / 6.0;
    }
    return 0.0;
}

} // namespace

ControlGrid::ControlGrid(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 2 || cols < 2) {
        throw std::invalid_argument("control grid must be at least 2x2");
    }
    dx_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
    dy_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
}

ControlGrid sample_control_displacements(WarpParams const &params, SeedKey const &seed) {
    check_params(params);
    ControlGrid grid(params.grid_rows, params.grid_cols);
    CounterRng rng(seed);
    for (int r = 0; r < params.grid_rows; ++r) {
        for (int c = 0; c < params.grid_cols; ++c) {
            double const dx = rng.next_normal(params.sigma);
            double const dy = rng.next_normal(params.sigma);
            grid.set(r, c, dx, dy);
        }
    }
    return grid;
}

DeformationField densify(ControlGrid const &grid, int width, int height) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("field dimensions must be positive");
    }
    DeformationField field(width, height);

    // Pixel (x, y) maps to lattice coordinates so that control point (r, c)
    // sits at lattice position (r, c); indices outside the lattice clamp to
    // the border (edge replication).
    double const scale_x =
        width > 1 ? static_cast<double>(grid.cols() - 1) / (width - 1) : 0.0;
    double const scale_y =
        height > 1 ? static_cast<double>(grid.rows() - 1) / (height - 1) : 0.0;

    auto clamp_row = [&](int r) { return std::clamp(r, 0, grid.rows() - 1); };
    auto clamp_col = [&](int c) { return std::clamp(c, 0, grid.cols() - 1); };

    for (int y = 0; y < height; ++y) {
        double const v = y * scale_y;
        int const r0 = static_cast<int>(std::floor(v));
        double wy[4];
        for (int i = 0; i < 4; ++i) {
            wy[i] = cubic_bspline(v - (r0 - 1 + i));
        }
        for (int x = 0; x < width; ++x) {
            double const u = x * scale_x;
            int const c0 = static_cast<int>(std::floor(u));
            double dx = 0.0;
            double dy = 0.0;
            for (int i = 0; i < 4; ++i) {
                int const r = clamp_row(r0 - 1 + i);
                for (int j = 0; j < 4; ++j) {
                    double const w = wy[i] * cubic_bspline(u - (c0 - 1 + j));
                    if (w == 0.0) {
                        continue;
                    }
                    int const c = clamp_col(c0 - 1 + j);
                    dx += w * grid.dx(r, c);
                    dy += w * grid.dy(r, c);
                }
            }
            field.set(x, y, dx, dy);
        }
    }
    return field;
}

DeformationField make_warp(WarpParams const &params, int width, int height, SeedKey const &seed) {
    return densify(sample_control_displacements(params, seed), width, height);
}

} // namespace segnoise
