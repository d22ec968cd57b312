#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "haznav/grid.hpp"

namespace haznav {

/// Binary occupancy layer: 0 free, 1 obstacle.
using ObstacleMap = Grid<std::uint8_t>;

/// Integer anxiety layer: every cell carries a score in {0,1,2,3}. Cells with
/// a nonzero score form the hazard set that seeds Gaussian cost propagation.
using AnxietyScoreMap = Grid<std::uint8_t>;

/// Continuous cost layer with values in [0,1].
using GaussianCostMap = Grid<double>;

inline constexpr std::uint8_t kMaxAnxiety = 3;

/// Parameters of the anxiety-driven Gaussian spread.
///
/// Each hazard cell spawns an isotropic Gaussian whose standard deviation
/// starts at sigma0 (cells) and is widened by the Weber-Fechner update
/// sigma * ln(a / temperature). temperature must stay below 1 so the update
/// is positive for every anxiety a >= 1; sigma_min floors the result.
struct GaussianParams {
    double sigma0{3.0};
    double temperature{0.5};
    double sigma_min{0.5};
    /// Contributions below this value may be skipped during propagation.
    /// Zero disables truncation (exact mode).
    double truncation_epsilon{1e-3};

    void validate() const {
        if (!(sigma0 > 0.0)) throw std::invalid_argument("GaussianParams: sigma0 must be > 0");
        if (!(temperature > 0.0 && temperature < 1.0))
            throw std::invalid_argument("GaussianParams: temperature must be in (0,1)");
        if (!(sigma_min > 0.0)) throw std::invalid_argument("GaussianParams: sigma_min must be > 0");
        if (truncation_epsilon < 0.0)
            throw std::invalid_argument("GaussianParams: truncation_epsilon must be >= 0");
    }
};

/// Weber-Fechner covariance update: sigma_new = max(sigma * ln(a/T), sigma_min).
/// Natural log; nondecreasing in anxiety for fixed sigma and T.
inline double update_sigma(double sigma, int anxiety, const GaussianParams& params) {
    if (anxiety < 1 || anxiety > kMaxAnxiety)
        throw std::invalid_argument("update_sigma: anxiety must be in {1,2,3}");
    if (!(sigma > 0.0)) throw std::invalid_argument("update_sigma: sigma must be > 0");
    return std::max(sigma * std::log(static_cast<double>(anxiety) / params.temperature),
                    params.sigma_min);
}

/// Cost contribution of one hazard cell at a query cell:
/// clamp(exp(-0.5 d^2 / sigma^2) * a/3, 0, 1), d in cells.
inline double gaussian_cost_at(const CellIndex& hazard_cell, int anxiety, double sigma,
                               const CellIndex& query_cell) {
    const double d = GridSpec::cell_distance(hazard_cell, query_cell);
    const double g = std::exp(-0.5 * (d * d) / (sigma * sigma));
    return std::clamp(g * (static_cast<double>(anxiety) / 3.0), 0.0, 1.0);
}

/// Propagates every hazard cell's Gaussian over the grid and keeps, per cell,
/// the maximum contribution. An empty hazard set yields an all-zero map.
///
/// With truncation_epsilon > 0 each hazard only touches the disc where its
/// contribution can reach epsilon; with epsilon = 0 every hazard is evaluated
/// against every cell.
inline GaussianCostMap propagate_costs(const AnxietyScoreMap& anxiety_map,
                                       const GaussianParams& params) {
    params.validate();
    const GridSpec& spec = anxiety_map.spec();
    GaussianCostMap cost(spec, 0.0);

    for (int hr = 0; hr < spec.rows; ++hr) {
        for (int hc = 0; hc < spec.cols; ++hc) {
            const int a = anxiety_map.at(hr, hc);
            if (a == 0) continue;
            const double sigma = update_sigma(params.sigma0, a, params);

            int r0 = 0, r1 = spec.rows - 1, c0 = 0, c1 = spec.cols - 1;
            if (params.truncation_epsilon > 0.0) {
                // exp(-d^2/2s^2) * a/3 >= eps  <=>  d <= s * sqrt(2 ln(a / 3 eps))
                const double arg = static_cast<double>(a) / (3.0 * params.truncation_epsilon);
                if (arg <= 1.0) continue;  // even d = 0 falls below epsilon
                const int radius = static_cast<int>(std::ceil(sigma * std::sqrt(2.0 * std::log(arg))));
                r0 = std::max(0, hr - radius);
                r1 = std::min(spec.rows - 1, hr + radius);
                c0 = std::max(0, hc - radius);
                c1 = std::min(spec.cols - 1, hc + radius);
            }
            const CellIndex hazard{hr, hc};
            for (int r = r0; r <= r1; ++r) {
                for (int c = c0; c <= c1; ++c) {
                    const double contribution = gaussian_cost_at(hazard, a, sigma, {r, c});
                    double& cell = cost.at(r, c);
                    cell = std::max(cell, contribution);
                }
            }
        }
    }
    return cost;
}

/// Max-fusion of the obstacle layer into the cost layer. Obstacle cells come
/// out exactly 1; everything stays in [0,1].
inline GaussianCostMap fuse(const ObstacleMap& obstacles, const GaussianCostMap& cost) {
    if (obstacles.spec() != cost.spec())
        throw std::invalid_argument("fuse: obstacle and cost maps must share a GridSpec");
    GaussianCostMap fused(cost.spec(), 0.0);
    const auto& obs = obstacles.data();
    const auto& in = cost.data();
    auto& out = fused.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::max(static_cast<double>(obs[i]), std::clamp(in[i], 0.0, 1.0));
    }
    return fused;
}

/// One frame's worth of projected hazard observations.
using ObservedAnxietyCells = std::vector<std::pair<CellIndex, std::uint8_t>>;

/// Visibility mask over the grid: nonzero cells were inside the sensor
/// frustum this frame.
using VisibilityMask = Grid<std::uint8_t>;

/// Latest-observation-wins persistence:
///  - cells inside visible_region are reset to 0 (observed hazard-free
///    unless re-asserted below),
///  - observations merge with per-frame max (duplicates keep the highest),
///  - cells outside visible_region keep their previous value.
inline AnxietyScoreMap apply_hazard_update(const AnxietyScoreMap& anxiety_map,
                                           const ObservedAnxietyCells& observed_cells,
                                           const VisibilityMask& visible_region) {
    if (anxiety_map.spec() != visible_region.spec())
        throw std::invalid_argument("apply_hazard_update: visibility mask spec mismatch");
    AnxietyScoreMap updated = anxiety_map;
    const auto& vis = visible_region.data();
    auto& cells = updated.data();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (vis[i]) cells[i] = 0;
    }
    for (const auto& [cell, anxiety] : observed_cells) {
        if (!updated.in_bounds(cell)) throw std::invalid_argument("apply_hazard_update: cell out of bounds");
        if (anxiety > kMaxAnxiety) throw std::invalid_argument("apply_hazard_update: anxiety out of range");
        std::uint8_t& value = updated.at(cell);
        value = std::max(value, anxiety);
    }
    return updated;
}

/// Binary disc dilation of the obstacle layer, radius in meters. Used to give
/// the point-based planner the robot's footprint clearance.
inline ObstacleMap inflate_obstacles(const ObstacleMap& obstacles, double radius_m) {
    const GridSpec& spec = obstacles.spec();
    ObstacleMap inflated(spec, 0);
    const int radius_cells = static_cast<int>(std::ceil(radius_m / spec.resolution));
    const double radius2 = (radius_m / spec.resolution) * (radius_m / spec.resolution);
    for (int r = 0; r < spec.rows; ++r) {
        for (int c = 0; c < spec.cols; ++c) {
            if (!obstacles.at(r, c)) continue;
            const int rr0 = std::max(0, r - radius_cells);
            const int rr1 = std::min(spec.rows - 1, r + radius_cells);
            const int cc0 = std::max(0, c - radius_cells);
            const int cc1 = std::min(spec.cols - 1, c + radius_cells);
            for (int rr = rr0; rr <= rr1; ++rr) {
                for (int cc = cc0; cc <= cc1; ++cc) {
                    const double dr = rr - r, dc = cc - c;
                    if (dr * dr + dc * dc <= radius2) inflated.at(rr, cc) = 1;
                }
            }
        }
    }
    return inflated;
}

}  // namespace haznav
