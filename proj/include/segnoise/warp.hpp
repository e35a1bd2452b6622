#pragma once

#include "segnoise/grid.hpp"
#include "segnoise/rng.hpp"

#include <vector>

namespace segnoise {

struct WarpParams {
    int grid_rows = 3;
    int grid_cols = 3;
    double sigma = 0.0; // std dev of control-point displacement, pixels

    bool operator==(WarpParams const &) const = default;
};

/// rows x cols lattice of control-point displacements.
class ControlGrid {
public:
    ControlGrid(int rows, int cols);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double dx(int row, int col) const { return dx_[index(row, col)]; }
    double dy(int row, int col) const { return dy_[index(row, col)]; }
    void set(int row, int col, double dx, double dy) {
        dx_[index(row, col)] = dx;
        dy_[index(row, col)] = dy;
    }

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * cols_ + col;
    }

    int rows_;
    int cols_;
    std::vector<double> dx_;
    std::vector<double> dy_;
};

/// Draw every displacement component i.i.d. from Normal(0, sigma^2),
/// fully determined by the seed.
ControlGrid sample_control_displacements(WarpParams const &params, SeedKey const &seed);

/// Interpolate the control lattice to a dense per-pixel field with separable
/// cubic B-splines. Control points sit at normalized positions spanning the
/// canvas corners; the lattice is extended outward by edge replication.
DeformationField densify(ControlGrid const &grid, int width, int height);

/// sample_control_displacements followed by densify.
DeformationField make_warp(WarpParams const &params, int width, int height, SeedKey const &seed);

} // namespace segnoise
