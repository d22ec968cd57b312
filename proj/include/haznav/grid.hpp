#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "haznav/geometry.hpp"

namespace haznav {

struct CellIndex {
    int row{0};
    int col{0};
    bool operator==(const CellIndex&) const = default;
};

/// Geometry of a top-down grid map: dimensions, meters-per-cell resolution,
/// and the world coordinates of cell (0,0)'s center. Rows advance along +y,
/// columns along +x. Conversions are exact round-trips for in-bounds cells.
struct GridSpec {
    int rows{0};
    int cols{0};
    double resolution{0.05};
    Vec2 origin{0.0, 0.0};

    bool operator==(const GridSpec&) const = default;

    void validate() const {
        if (rows <= 0 || cols <= 0) throw std::invalid_argument("GridSpec: rows/cols must be positive");
        if (!(resolution > 0.0)) throw std::invalid_argument("GridSpec: resolution must be > 0");
    }

    bool contains(const CellIndex& c) const {
        return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols;
    }

    /// World coordinates of a cell center.
    Vec2 world_of(const CellIndex& c) const {
        return {origin.x + c.col * resolution, origin.y + c.row * resolution};
    }

    /// Nearest cell to a world point (may be out of bounds; check contains()).
    CellIndex grid_of(const Vec2& p) const {
        return {static_cast<int>(std::llround((p.y - origin.y) / resolution)),
                static_cast<int>(std::llround((p.x - origin.x) / resolution))};
    }

    /// Euclidean distance between two cell centers, in cells.
    static double cell_distance(const CellIndex& a, const CellIndex& b) {
        const double dr = a.row - b.row;
        const double dc = a.col - b.col;
        return std::sqrt(dr * dr + dc * dc);
    }
};

/// Dense row-major cell storage over a GridSpec.
template <typename T>
class Grid {
public:
    Grid() = default;
    explicit Grid(GridSpec spec, T fill = T{}) : spec_(spec) {
        spec_.validate();
        cells_.assign(static_cast<std::size_t>(spec_.rows) * spec_.cols, fill);
    }

    const GridSpec& spec() const { return spec_; }
    int rows() const { return spec_.rows; }
    int cols() const { return spec_.cols; }
    std::size_t size() const { return cells_.size(); }

    T& at(int row, int col) { return cells_[static_cast<std::size_t>(row) * spec_.cols + col]; }
    const T& at(int row, int col) const { return cells_[static_cast<std::size_t>(row) * spec_.cols + col]; }
    T& at(const CellIndex& c) { return at(c.row, c.col); }
    const T& at(const CellIndex& c) const { return at(c.row, c.col); }

    bool in_bounds(const CellIndex& c) const { return spec_.contains(c); }

    void fill(const T& v) { std::fill(cells_.begin(), cells_.end(), v); }

    std::vector<T>& data() { return cells_; }
    const std::vector<T>& data() const { return cells_; }

    bool operator==(const Grid&) const = default;

private:
    GridSpec spec_{};
    std::vector<T> cells_;
};

}  // namespace haznav
