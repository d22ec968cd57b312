#pragma once

// Test-only oracles: brute-force counterparts kept independent of the library
// implementation paths they check.

#include <cmath>
#include <queue>
#include <random>
#include <vector>

#include "haznav/cost_map.hpp"
#include "haznav/dstar_lite.hpp"

namespace haznav::oracles {

/// Per-hazard / per-cell double loop, no truncation.
inline GaussianCostMap propagate_brute_force(const AnxietyScoreMap& anxiety,
                                             const GaussianParams& params) {
    const GridSpec& spec = anxiety.spec();
    GaussianCostMap out(spec, 0.0);
    for (int hr = 0; hr < spec.rows; ++hr) {
        for (int hc = 0; hc < spec.cols; ++hc) {
            const int a = anxiety.at(hr, hc);
            if (a == 0) continue;
            const double sigma =
                std::max(params.sigma0 * std::log(a / params.temperature), params.sigma_min);
            for (int r = 0; r < spec.rows; ++r) {
                for (int c = 0; c < spec.cols; ++c) {
                    const double dr = hr - r, dc = hc - c;
                    const double d2 = dr * dr + dc * dc;
                    const double v = std::exp(-0.5 * d2 / (sigma * sigma)) * (a / 3.0);
                    out.at(r, c) = std::max(out.at(r, c), std::clamp(v, 0.0, 1.0));
                }
            }
        }
    }
    return out;
}

inline AnxietyScoreMap random_anxiety_map(std::mt19937_64& rng, int max_dim, int max_hazards) {
    std::uniform_int_distribution<int> dim(4, max_dim);
    const GridSpec spec{dim(rng), dim(rng), 0.05, {}};
    AnxietyScoreMap map(spec, 0);
    std::uniform_int_distribution<int> count(0, max_hazards);
    std::uniform_int_distribution<int> score(1, 3);
    std::uniform_int_distribution<int> row(0, spec.rows - 1);
    std::uniform_int_distribution<int> col(0, spec.cols - 1);
    const int n = count(rng);
    for (int i = 0; i < n; ++i) map.at(row(rng), col(rng)) = static_cast<std::uint8_t>(score(rng));
    return map;
}

struct DijkstraResult {
    std::vector<CellIndex> path;
    double total{kInfCost};
};

/// Independent Dijkstra over the same 8-connected graph, deterministic
/// (dist, row, col) pop order; total is summed in path order.
inline DijkstraResult dijkstra(const GaussianCostMap& map, const CellIndex& start,
                               const CellIndex& goal, double w, double block_threshold = 0.99) {
    const GridSpec& spec = map.spec();
    const auto id = [&](const CellIndex& c) {
        return static_cast<std::size_t>(c.row) * spec.cols + c.col;
    };
    std::vector<double> dist(static_cast<std::size_t>(spec.rows) * spec.cols, kInfCost);
    std::vector<int> parent(dist.size(), -1);

    struct Node {
        double d;
        int row, col;
        bool operator>(const Node& o) const {
            if (d != o.d) return d > o.d;
            if (row != o.row) return row > o.row;
            return col > o.col;
        }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> pq;
    dist[id(start)] = 0.0;
    pq.push({0.0, start.row, start.col});
    while (!pq.empty()) {
        const Node n = pq.top();
        pq.pop();
        const CellIndex u{n.row, n.col};
        if (n.d > dist[id(u)]) continue;
        if (u == goal) break;
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                const CellIndex v{u.row + dr, u.col + dc};
                if (!spec.contains(v)) continue;
                const double c = edge_cost(u, v, map, w, block_threshold);
                if (c == kInfCost) continue;
                const double nd = dist[id(u)] + c;
                if (nd < dist[id(v)]) {
                    dist[id(v)] = nd;
                    parent[id(v)] = static_cast<int>(id(u));
                    pq.push({nd, v.row, v.col});
                }
            }
        }
    }

    DijkstraResult out;
    if (dist[id(goal)] == kInfCost) return out;
    std::vector<CellIndex> rev;
    CellIndex c = goal;
    while (!(c == start)) {
        rev.push_back(c);
        const int p = parent[id(c)];
        c = {p / spec.cols, p % spec.cols};
    }
    rev.push_back(start);
    out.path.assign(rev.rbegin(), rev.rend());
    out.total = 0.0;
    for (std::size_t i = 0; i + 1 < out.path.size(); ++i)
        out.total += edge_cost(out.path[i], out.path[i + 1], map, w, block_threshold);
    return out;
}

inline GaussianCostMap random_cost_map(std::mt19937_64& rng, int rows, int cols,
                                       double obstacle_density) {
    GaussianCostMap map(GridSpec{rows, cols, 0.05, {}}, 0.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> cost(0.0, 0.9);
    for (auto& v : map.data()) v = unit(rng) < obstacle_density ? 1.0 : cost(rng);
    return map;
}

}  // namespace haznav::oracles
