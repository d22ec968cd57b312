#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "haznav/cost_map.hpp"
#include "haznav/grid.hpp"

namespace haznav {

inline constexpr double kInfCost = std::numeric_limits<double>::infinity();

/// Slack for priority-key comparisons at the search frontier. Keys of
/// vertices on an optimal chain tie exactly in real arithmetic; summation
/// order makes them differ by ulps in floating point, and a guard vertex
/// rounding a hair above the start key would end the search with stale
/// values. Processing a little past the start key is always safe.
inline constexpr double kKeyEpsilon = 1e-6;

/// A cell is impassable once its fused cost exceeds the block threshold.
inline bool cell_blocked(double cost, double block_threshold) { return cost > block_threshold; }

/// Traversal cost of one 8-connected move: len(a,b) * (1 + w * mean cell cost),
/// len 1 or sqrt(2) cells. Infinite when either endpoint is blocked. The raw
/// len is an admissible Euclidean heuristic for this metric.
inline double edge_cost(const CellIndex& a, const CellIndex& b, const GaussianCostMap& map,
                        double w, double block_threshold = 0.99) {
    const double ca = map.at(a);
    const double cb = map.at(b);
    if (cell_blocked(ca, block_threshold) || cell_blocked(cb, block_threshold)) return kInfCost;
    const bool diagonal = a.row != b.row && a.col != b.col;
    const double len = diagonal ? std::sqrt(2.0) : 1.0;
    return len * (1.0 + w * 0.5 * (ca + cb));
}

struct PlanQuery {
    CellIndex start;
    CellIndex goal;
    GaussianCostMap map;  // snapshot, owned
    double weight{10.0};
    double block_threshold{0.99};
};

enum class PlanStatus { ok, no_path, goal_blocked };

struct PlanResult {
    PlanStatus status{PlanStatus::no_path};
    std::vector<CellIndex> path;  // start -> goal, 8-adjacent steps
    double total_cost{kInfCost};  // sum of edge costs in path order
    long expanded{0};             // vertex expansions (diagnostics)

    bool ok() const { return status == PlanStatus::ok; }
};

/// Incremental shortest-path planner (D* Lite) over a fused cost map.
/// Searches goal-to-start so cost changes and a moving start are repaired
/// without replanning from scratch. Deterministic: priority ties are broken
/// by lower row, then lower column, both in the queue and during path
/// extraction.
class DStarLitePlanner {
public:
    PlanResult plan(PlanQuery query) {
        query_ = std::move(query);
        const GridSpec& spec = query_.map.spec();
        spec.validate();
        if (!spec.contains(query_.start) || !spec.contains(query_.goal))
            throw std::invalid_argument("plan: start/goal out of bounds");
        n_rows_ = spec.rows;
        n_cols_ = spec.cols;
        g_.assign(cell_count(), kInfCost);
        rhs_.assign(cell_count(), kInfCost);
        queued_.assign(cell_count(), QueueState{});
        queue_ = {};
        km_ = 0.0;
        last_start_ = query_.start;
        expanded_ = 0;
        initialized_ = true;

        rhs_[id(query_.goal)] = 0.0;
        push(query_.goal);
        return solve();
    }

    /// Applies cell cost updates and repairs the plan from the robot's
    /// current cell. Requires a prior plan() call.
    PlanResult replan(const std::vector<std::pair<CellIndex, double>>& changed_cells,
                      const CellIndex& current_pose_cell) {
        if (!initialized_) throw std::logic_error("replan: no prior plan");
        if (!query_.map.spec().contains(current_pose_cell))
            throw std::invalid_argument("replan: pose out of bounds");

        km_ += heuristic(last_start_, current_pose_cell);
        last_start_ = current_pose_cell;
        query_.start = current_pose_cell;

        for (const auto& [cell, new_cost] : changed_cells) {
            if (!query_.map.spec().contains(cell))
                throw std::invalid_argument("replan: changed cell out of bounds");
            if (query_.map.at(cell) == new_cost) continue;
            query_.map.at(cell) = new_cost;
            // A cell's cost enters every edge incident to it: refresh the cell
            // and all its neighbors.
            update_vertex(cell);
            for_each_neighbor(cell, [&](const CellIndex& n, double) { update_vertex(n); });
        }
        return solve();
    }

    const GaussianCostMap& map() const { return query_.map; }

private:
    struct Key {
        double k1{0.0};
        double k2{0.0};
        int row{0};
        int col{0};

        bool operator<(const Key& o) const {
            if (k1 != o.k1) return k1 < o.k1;
            if (k2 != o.k2) return k2 < o.k2;
            if (row != o.row) return row < o.row;
            return col < o.col;
        }
    };

    struct QueueState {
        bool in_queue{false};
        double k1{0.0};
        double k2{0.0};
    };

    struct Entry {
        Key key;
        CellIndex cell;
        bool operator>(const Entry& o) const { return o.key < key; }
    };

    std::size_t cell_count() const { return static_cast<std::size_t>(n_rows_) * n_cols_; }
    std::size_t id(const CellIndex& c) const { return static_cast<std::size_t>(c.row) * n_cols_ + c.col; }

    static double heuristic(const CellIndex& a, const CellIndex& b) {
        return GridSpec::cell_distance(a, b);
    }

    Key key_of(const CellIndex& c) const {
        const double m = std::min(g_[id(c)], rhs_[id(c)]);
        return Key{m + heuristic(query_.start, c) + km_, m, c.row, c.col};
    }

    void push(const CellIndex& c) {
        const Key k = key_of(c);
        queued_[id(c)] = QueueState{true, k.k1, k.k2};
        queue_.push(Entry{k, c});
    }

    void remove(const CellIndex& c) { queued_[id(c)].in_queue = false; }

    template <typename F>
    void for_each_neighbor(const CellIndex& c, F&& f) const {
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                const CellIndex n{c.row + dr, c.col + dc};
                if (n.row < 0 || n.row >= n_rows_ || n.col < 0 || n.col >= n_cols_) continue;
                f(n, edge_cost(c, n, query_.map, query_.weight, query_.block_threshold));
            }
        }
    }

    void update_vertex(const CellIndex& u) {
        if (!(u == query_.goal)) {
            double best = kInfCost;
            for_each_neighbor(u, [&](const CellIndex& n, double c) {
                const double v = c + g_[id(n)];
                if (v < best) best = v;
            });
            rhs_[id(u)] = best;
        }
        remove(u);
        if (g_[id(u)] != rhs_[id(u)]) push(u);
    }

    /// Pops stale lazy-deleted entries; returns false when the queue is empty.
    bool peek(Entry& out) {
        while (!queue_.empty()) {
            const Entry& top = queue_.top();
            const QueueState& st = queued_[id(top.cell)];
            if (st.in_queue && st.k1 == top.key.k1 && st.k2 == top.key.k2) {
                out = top;
                return true;
            }
            queue_.pop();
        }
        return false;
    }

    void compute_shortest_path() {
        const CellIndex& start = query_.start;
        Entry top;
        while (peek(top)) {
            const Key start_key = key_of(start);
            if (top.key.k1 >= start_key.k1 + kKeyEpsilon && rhs_[id(start)] == g_[id(start)]) break;
            queue_.pop();
            remove(top.cell);

            const Key fresh = key_of(top.cell);
            if (top.key < fresh) {
                queued_[id(top.cell)] = QueueState{true, fresh.k1, fresh.k2};
                queue_.push(Entry{fresh, top.cell});
            } else if (g_[id(top.cell)] > rhs_[id(top.cell)]) {
                ++expanded_;
                g_[id(top.cell)] = rhs_[id(top.cell)];
                for_each_neighbor(top.cell, [&](const CellIndex& n, double) { update_vertex(n); });
            } else {
                ++expanded_;
                g_[id(top.cell)] = kInfCost;
                update_vertex(top.cell);
                for_each_neighbor(top.cell, [&](const CellIndex& n, double) { update_vertex(n); });
            }
        }
    }

    PlanResult solve() {
        PlanResult result;
        if (cell_blocked(query_.map.at(query_.goal), query_.block_threshold)) {
            result.status = PlanStatus::goal_blocked;
            return result;
        }
        compute_shortest_path();
        result.expanded = expanded_;
        if (g_[id(query_.start)] == kInfCost) {
            result.status = PlanStatus::no_path;
            return result;
        }
        return extract_path(std::move(result));
    }

    /// Walks greedily from start along argmin(c(s,n) + g(n)); deterministic
    /// row-major tie-break. The accumulated sum in path order is total_cost.
    PlanResult extract_path(PlanResult result) {
        std::vector<CellIndex> path{query_.start};
        double total = 0.0;
        CellIndex s = query_.start;
        const std::size_t guard = cell_count() + 1;
        while (!(s == query_.goal)) {
            double best = kInfCost;
            double best_edge = kInfCost;
            CellIndex next{-1, -1};
            for_each_neighbor(s, [&](const CellIndex& n, double c) {
                const double v = c + g_[id(n)];
                if (v < best) {
                    best = v;
                    best_edge = c;
                    next = n;
                }
            });
            if (next.row < 0 || best == kInfCost || path.size() > guard) {
                result.status = PlanStatus::no_path;
                return result;
            }
            total += best_edge;
            path.push_back(next);
            s = next;
        }
        result.status = PlanStatus::ok;
        result.path = std::move(path);
        result.total_cost = total;
        return result;
    }

    PlanQuery query_{};
    int n_rows_{0};
    int n_cols_{0};
    std::vector<double> g_;
    std::vector<double> rhs_;
    std::vector<QueueState> queued_;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue_;
    double km_{0.0};
    CellIndex last_start_{};
    long expanded_{0};
    bool initialized_{false};
};

}  // namespace haznav
