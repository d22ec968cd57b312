#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "haznav/grid.hpp"

namespace haznav {

/// Stand-in for "no seed reachable": kept finite so the parabola envelope
/// arithmetic stays NaN-free.
inline constexpr double kUnseededSquared = 1e12;

namespace detail {

/// 1D squared distance transform (lower envelope of parabolas).
inline void squared_dt_1d(const std::vector<double>& f, std::vector<double>& out) {
    const int n = static_cast<int>(f.size());
    out.assign(n, 0.0);
    std::vector<int> v(n, 0);
    std::vector<double> z(n + 1, 0.0);
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double d = q - v[k];
        out[q] = d * d + f[v[k]];
    }
}

}  // namespace detail

/// Exact Euclidean distance (in cells) from every cell to the nearest seed
/// cell. Seeds are the nonzero cells of `seeds`. Cells with no seed anywhere
/// come out around sqrt(kUnseededSquared) cells.
inline Grid<double> euclidean_distance_cells(const Grid<std::uint8_t>& seeds) {
    const GridSpec& spec = seeds.spec();
    Grid<double> sq(spec, kUnseededSquared);
    for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c)
            if (seeds.at(r, c)) sq.at(r, c) = 0.0;

    std::vector<double> line, out;
    // columns
    line.resize(spec.rows);
    for (int c = 0; c < spec.cols; ++c) {
        for (int r = 0; r < spec.rows; ++r) line[r] = sq.at(r, c);
        detail::squared_dt_1d(line, out);
        for (int r = 0; r < spec.rows; ++r) sq.at(r, c) = out[r];
    }
    // rows
    line.resize(spec.cols);
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) line[c] = sq.at(r, c);
        detail::squared_dt_1d(line, out);
        for (int c = 0; c < spec.cols; ++c) sq.at(r, c) = out[c];
    }
    for (auto& v : sq.data()) v = std::sqrt(v);
    return sq;
}

}  // namespace haznav
