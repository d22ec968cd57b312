#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "haznav/dstar_lite.hpp"
#include "oracles.hpp"

using namespace haznav;
using oracles::dijkstra;
using oracles::random_cost_map;

namespace {

bool path_is_valid(const PlanResult& plan, const GaussianCostMap& map, double block_threshold) {
    if (plan.path.empty()) return false;
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < plan.path.size(); ++i) {
        const auto& a = plan.path[i];
        const auto& b = plan.path[i + 1];
        const int dr = std::abs(a.row - b.row), dc = std::abs(a.col - b.col);
        if (dr > 1 || dc > 1 || (dr == 0 && dc == 0)) return false;
        if (cell_blocked(map.at(b), block_threshold)) return false;
        total += edge_cost(a, b, map, 10.0, block_threshold);
    }
    if (cell_blocked(map.at(plan.path.front()), block_threshold)) return false;
    return std::abs(total - plan.total_cost) < 1e-9;
}

}  // namespace

TEST_CASE("edge_cost follows len * (1 + w * mean cost)", "[planner]") {
    GaussianCostMap map(GridSpec{4, 4, 0.05, {}}, 0.0);

    SECTION("free axis move costs exactly 1") {
        REQUIRE(edge_cost({0, 0}, {0, 1}, map, 10.0) == 1.0);
        REQUIRE(edge_cost({0, 0}, {0, 1}, map, 123.0) == 1.0);
    }
    SECTION("blocked endpoints are infinite") {
        map.at(1, 1) = 1.0;
        REQUIRE(edge_cost({1, 1}, {1, 2}, map, 10.0) == kInfCost);
        REQUIRE(edge_cost({1, 2}, {1, 1}, map, 10.0) == kInfCost);
    }
    SECTION("diagonal with cost 0.5 on both ends and w=2 gives 2*sqrt(2)") {
        map.at(2, 2) = 0.5;
        map.at(3, 3) = 0.5;
        REQUIRE(edge_cost({2, 2}, {3, 3}, map, 2.0) ==
                Catch::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
    }
    SECTION("strictly positive and at least the heuristic length") {
        map.at(0, 1) = 0.3;
        const double c = edge_cost({0, 0}, {0, 1}, map, 10.0);
        REQUIRE(c > 0.0);
        REQUIRE(c >= 1.0);  // admissibility of the euclidean heuristic
    }
}

TEST_CASE("plan: straight line across an empty map", "[planner]") {
    GaussianCostMap map(GridSpec{10, 10, 0.05, {}}, 0.0);
    DStarLitePlanner planner;
    const auto result = planner.plan({{0, 0}, {0, 9}, map, 10.0, 0.99});
    REQUIRE(result.ok());
    REQUIRE(result.path.size() == 10);
    REQUIRE(result.total_cost == 9.0);
    for (const auto& c : result.path) REQUIRE(c.row == 0);
}

TEST_CASE("plan: wall with one gap matches the Dijkstra oracle exactly", "[planner][oracle]") {
    GaussianCostMap map(GridSpec{15, 15, 0.05, {}}, 0.0);
    for (int r = 0; r < 15; ++r) map.at(r, 7) = 1.0;
    map.at(9, 7) = 0.2;  // the gap
    DStarLitePlanner planner;
    const auto result = planner.plan({{2, 1}, {3, 13}, map, 10.0, 0.99});
    const auto oracle = dijkstra(map, {2, 1}, {3, 13}, 10.0);
    REQUIRE(result.ok());
    REQUIRE(result.total_cost == oracle.total);
    bool through_gap = false;
    for (const auto& c : result.path) through_gap = through_gap || (c.row == 9 && c.col == 7);
    REQUIRE(through_gap);
}

TEST_CASE("plan: walled-off goal reports NoPath", "[planner]") {
    GaussianCostMap map(GridSpec{10, 10, 0.05, {}}, 0.0);
    for (int r = 3; r <= 5; ++r)
        for (int c = 3; c <= 5; ++c) map.at(r, c) = 1.0;
    map.at(4, 4) = 0.0;  // free goal cell inside the wall ring
    DStarLitePlanner planner;
    const auto result = planner.plan({{0, 0}, {4, 4}, map, 10.0, 0.99});
    REQUIRE(result.status == PlanStatus::no_path);
}

TEST_CASE("plan: goal above the block threshold reports GoalBlocked", "[planner]") {
    GaussianCostMap map(GridSpec{10, 10, 0.05, {}}, 0.0);
    map.at(4, 4) = 1.0;
    DStarLitePlanner planner;
    const auto result = planner.plan({{0, 0}, {4, 4}, map, 10.0, 0.99});
    REQUIRE(result.status == PlanStatus::goal_blocked);
}

TEST_CASE("plan is deterministic", "[planner]") {
    std::mt19937_64 rng(99);
    const auto map = random_cost_map(rng, 30, 30, 0.2);
    DStarLitePlanner p1, p2;
    const auto a = p1.plan({{0, 0}, {29, 29}, map, 10.0, 0.99});
    const auto b = p2.plan({{0, 0}, {29, 29}, map, 10.0, 0.99});
    REQUIRE(a.status == b.status);
    REQUIRE(a.path == b.path);
    REQUIRE(a.total_cost == b.total_cost);
}

TEST_CASE("optimality on random maps: exact Dijkstra agreement", "[planner][oracle]") {
    std::mt19937_64 rng(314);
    int solved = 0;
    for (int trial = 0; trial < 40; ++trial) {
        auto map = random_cost_map(rng, 50, 50, 0.25);
        const CellIndex start{1, 1}, goal{48, 48};
        map.at(start) = std::min(map.at(start), 0.5);
        map.at(goal) = std::min(map.at(goal), 0.5);
        DStarLitePlanner planner;
        const auto plan = planner.plan({start, goal, map, 10.0, 0.99});
        const auto oracle = dijkstra(map, start, goal, 10.0);
        if (!plan.ok()) {
            REQUIRE(oracle.total == kInfCost);
            continue;
        }
        ++solved;
        REQUIRE(path_is_valid(plan, map, 0.99));
        REQUIRE(plan.total_cost == oracle.total);
    }
    REQUIRE(solved > 25);
}

TEST_CASE("replan: null update keeps the identical path", "[planner]") {
    std::mt19937_64 rng(7);
    const auto map = random_cost_map(rng, 20, 20, 0.1);
    DStarLitePlanner planner;
    const auto first = planner.plan({{0, 0}, {19, 19}, map, 10.0, 0.99});
    REQUIRE(first.ok());
    const auto again = planner.replan({}, {0, 0});
    REQUIRE(again.ok());
    REQUIRE(again.path == first.path);
    REQUIRE(again.total_cost == first.total_cost);
}

TEST_CASE("replan requires a prior plan", "[planner]") {
    DStarLitePlanner planner;
    REQUIRE_THROWS_AS(planner.replan({}, {0, 0}), std::logic_error);
}

TEST_CASE("replan: incremental repair equals from-scratch planning", "[planner][oracle]") {
    std::mt19937_64 rng(2718);
    std::uniform_int_distribution<int> cell(0, 39);
    std::uniform_real_distribution<double> cost(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 20);

    for (int trial = 0; trial < 12; ++trial) {
        auto map = random_cost_map(rng, 40, 40, 0.15);
        const CellIndex goal{38, 38};
        CellIndex pose{1, 1};
        if (cell_blocked(map.at(pose), 0.99) || cell_blocked(map.at(goal), 0.99)) continue;

        DStarLitePlanner incremental;
        auto plan = incremental.plan({pose, goal, map, 10.0, 0.99});

        for (int round = 0; round < 3; ++round) {
            // robot advances a bit along its plan
            if (plan.ok() && plan.path.size() > 4) pose = plan.path[3];

            std::vector<std::pair<CellIndex, double>> changes;
            const int n = count(rng);
            for (int i = 0; i < n; ++i) {
                const CellIndex c{cell(rng), cell(rng)};
                if (c == pose || c == goal) continue;
                const double v = cost(rng) < 0.25 ? 1.0 : cost(rng) * 0.9;
                changes.push_back({c, v});
                map.at(c) = v;
            }
            plan = incremental.replan(changes, pose);

            DStarLitePlanner fresh;
            const auto scratch = fresh.plan({pose, goal, map, 10.0, 0.99});
            REQUIRE(plan.status == scratch.status);
            if (plan.ok()) {
                REQUIRE(plan.total_cost == Catch::Approx(scratch.total_cost).margin(1e-9));
                REQUIRE(path_is_valid(plan, map, 0.99));
            }
        }
    }
}

TEST_CASE("cost monotonicity: raising a cell never cheapens the plan", "[planner][property]") {
    std::mt19937_64 rng(555);
    for (int trial = 0; trial < 10; ++trial) {
        auto map = random_cost_map(rng, 25, 25, 0.1);
        const CellIndex start{0, 0}, goal{24, 24};
        if (cell_blocked(map.at(start), 0.99) || cell_blocked(map.at(goal), 0.99)) continue;
        DStarLitePlanner planner;
        const auto before = planner.plan({start, goal, map, 10.0, 0.99});
        if (!before.ok()) continue;

        // raise a cell on the current best path (not start/goal)
        const CellIndex target = before.path[before.path.size() / 2];
        if (target == start || target == goal) continue;
        const double raised = std::min(0.95, map.at(target) + 0.4);
        map.at(target) = raised;
        DStarLitePlanner fresh;
        const auto after = fresh.plan({start, goal, map, 10.0, 0.99});
        REQUIRE(after.ok());
        REQUIRE(after.total_cost >= before.total_cost - 1e-12);
    }
}

TEST_CASE("replan: removing a hazard never increases the cost", "[planner][oracle]") {
    GaussianCostMap map(GridSpec{20, 20, 0.05, {}}, 0.0);
    for (int r = 5; r < 15; ++r)
        for (int c = 5; c < 15; ++c) map.at(r, c) = 0.8;  // hazard halo in the middle

    DStarLitePlanner planner;
    const auto with_hazard = planner.plan({{10, 0}, {10, 19}, map, 10.0, 0.99});
    REQUIRE(with_hazard.ok());

    std::vector<std::pair<CellIndex, double>> clears;
    for (int r = 5; r < 15; ++r)
        for (int c = 5; c < 15; ++c) clears.push_back({{r, c}, 0.0});
    const auto cleared = planner.replan(clears, {10, 0});
    REQUIRE(cleared.ok());
    REQUIRE(cleared.total_cost <= with_hazard.total_cost + 1e-12);

    GaussianCostMap empty_map(GridSpec{20, 20, 0.05, {}}, 0.0);
    DStarLitePlanner fresh;
    const auto scratch = fresh.plan({{10, 0}, {10, 19}, empty_map, 10.0, 0.99});
    REQUIRE(cleared.total_cost == Catch::Approx(scratch.total_cost).margin(1e-9));
}
