#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "haznav/cost_map.hpp"
#include "haznav/distance_transform.hpp"
#include "haznav/dstar_lite.hpp"
#include "haznav/hazard_pipeline.hpp"
#include "haznav/mppi.hpp"
#include "haznav/perception.hpp"
#include "haznav/prompts.hpp"
#include "haznav/sim.hpp"

namespace haznav {

/// Stack configurations compared in the experiments:
///  - geometric: live occupancy from depth only, no hazard reasoning.
///  - e2map: frozen pre-built map; costs appear only at locations where a
///    collision/near-miss event actually happened, persisting across runs.
///  - ours: live occupancy plus the full language-as-cost hazard pipeline.
enum class Method { geometric, e2map, ours };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::geometric: return "geometric";
        case Method::e2map: return "e2map";
        case Method::ours: return "ours";
    }
    return "?";
}

inline std::optional<Method> parse_method(const std::string& s) {
    if (s == "geometric") return Method::geometric;
    if (s == "e2map") return Method::e2map;
    if (s == "ours") return Method::ours;
    return std::nullopt;
}

struct StackParams {
    GaussianParams gaussian;
    MppiParams mppi;
    double planner_weight{10.0};
    double block_threshold{0.99};
    double inflation_radius{0.2};
    /// Soft cost decay beyond the lethal inflation, so planned paths keep a
    /// standoff from obstacle frontiers instead of hugging them.
    double skirt_gain{0.55};
    double skirt_sigma_cells{2.0};
    double hazard_latency{4.0};
    int n_min_points{1};
    std::vector<HazardFixture> fixtures;
};

/// Collision/near-miss locations recorded by the e2map baseline; persists
/// across the runs of one scenario series.
struct EventMemory {
    std::vector<Vec2> event_points;
    double event_radius{0.35};  // meters of full-anxiety patch per event
};

/// Marks cells swept by the depth scan (free space plus hit surfaces) and
/// integrates hits into the obstacle layer with latest-observation-wins
/// semantics: cells traversed by a ray are cleared, hit cells are set.
inline VisibilityMask integrate_depth_scan(ObstacleMap& obstacles, const SensorFrame& frame,
                                           const CameraModel& camera) {
    const GridSpec& grid = obstacles.spec();
    VisibilityMask visible(grid, 0);
    const Pose2D cam_pose = frame.pose.compose(camera.mount);
    const CellIndex cam_cell = grid.grid_of(cam_pose.position());

    for (int u = 0; u < frame.depth.width; ++u) {
        const double r = frame.depth.at(u, 0);
        const bool hit = DepthImage::valid(r) && r <= camera.max_range;
        const double reach = hit ? r : camera.max_range;
        const double bearing = cam_pose.heading + camera.bearing_of_column(u);
        const Vec2 dir{std::cos(bearing), std::sin(bearing)};
        const Vec2 end = cam_pose.position() + dir * reach;
        const CellIndex end_cell = grid.grid_of(end);

        // Bresenham from camera cell to ray end
        int r0 = cam_cell.row, c0 = cam_cell.col;
        const int r1 = end_cell.row, c1 = end_cell.col;
        const int dr = std::abs(r1 - r0), dc = std::abs(c1 - c0);
        const int sr = r0 < r1 ? 1 : -1, sc = c0 < c1 ? 1 : -1;
        int err = dc - dr;
        while (true) {
            const CellIndex cell{r0, c0};
            const bool is_end = (r0 == r1 && c0 == c1);
            if (grid.contains(cell)) {
                visible.at(cell) = 1;
                if (is_end && hit) {
                    obstacles.at(cell) = 1;
                } else {
                    obstacles.at(cell) = 0;
                }
            }
            if (is_end) break;
            const int e2 = 2 * err;
            if (e2 > -dr) {
                err -= dr;
                c0 += sc;
            }
            if (e2 < dc) {
                err += dc;
                r0 += sr;
            }
        }
    }
    return visible;
}

/// One closed-loop navigation run: sense -> (slow) hazard cycle -> segment &
/// project -> map update -> replan -> sample controls -> step. Deterministic
/// for a fixed seed.
class NavStack {
public:
    NavStack(Method method, StackParams params, std::shared_ptr<HazardBackend> backend,
             EventMemory* memory = nullptr)
        : method_(method), params_(std::move(params)), backend_(std::move(backend)), memory_(memory) {}

    RunRecord run(World& world, std::uint64_t seed, GaussianCostMap* final_map = nullptr) {
        world.reset();
        const WorldSpec& ws = world.spec();
        const GridSpec& grid = ws.grid;
        grid.validate();

        RunRecord record;
        ObstacleMap obstacles(grid, 0);
        AnxietyScoreMap anxiety(grid, 0);

        if (method_ == Method::e2map) {
            obstacles = world.prior_obstacle_map();
            if (memory_) {
                // an event marks a patch, not a point: the hazard that caused
                // it (a swinging door, a sliding chair) extends past the exact
                // collision location
                const int r_cells = static_cast<int>(std::ceil(memory_->event_radius / grid.resolution));
                for (const auto& p : memory_->event_points) {
                    const CellIndex center = grid.grid_of(p);
                    for (int dr = -r_cells; dr <= r_cells; ++dr) {
                        for (int dc = -r_cells; dc <= r_cells; ++dc) {
                            if (dr * dr + dc * dc > r_cells * r_cells) continue;
                            const CellIndex c{center.row + dr, center.col + dc};
                            if (grid.contains(c)) anxiety.at(c) = kMaxAnxiety;
                        }
                    }
                }
            }
        }

        std::optional<HazardCycle> cycle;
        if (method_ == Method::ours) {
            cycle.emplace(backend_, default_prompts(), params_.hazard_latency);
        }

        DStarLitePlanner planner;
        GaussianCostMap prev_fused;
        GaussianCostMap hazard_cost(grid, 0.0);
        AnxietyScoreMap last_propagated(grid, 0);
        bool have_plan_state = false;
        PlanResult plan;
        PathDistanceField path_field;
        std::vector<CellIndex> last_path;

        MppiParams mppi = params_.mppi;
        mppi.dt = ws.dt;
        mppi.v_max = std::min(mppi.v_max, ws.robot.v_max);
        mppi.omega_max = std::min(mppi.omega_max, ws.robot.omega_max);
        mppi.block_threshold = params_.block_threshold;
        mppi.goal = ws.robot.goal;
        // warm start: cruise forward rather than waiting for sampling to
        // discover motion from a standstill
        ControlSequence nominal{
            std::vector<ControlCommand>(mppi.horizon, ControlCommand{0.6 * mppi.v_max, 0.0}), ws.dt};

        const CellIndex goal_cell = grid.grid_of(ws.robot.goal);
        if (!grid.contains(goal_cell)) throw std::invalid_argument("run: goal outside the grid");

        SensorFrame frame = world.render();
        Pose2D prev_pose = world.robot_pose();
        record.outcome = "timeout";

        for (long tick = 0; tick < ws.max_ticks; ++tick) {
            TraceRow row;
            row.tick = tick;
            row.time = world.time();

            // slow reasoning loop + anxiety layer (full pipeline only)
            if (cycle) {
                cycle->step(world.time(), frame.image);
                const auto& snap = cycle->current();
                VisibilityMask visible = integrate_depth_scan(obstacles, frame, ws.camera);
                ObservedAnxietyCells observed;
                if (snap && !snap->assessment.scores.empty()) {
                    const SegmentationMaskSet masks = segment_hazards(frame.image, snap->assessment.scores);
                    const auto points = masks_to_points(masks, frame.depth, ws.camera, frame.pose);
                    observed = points_to_anxiety_cells(points, grid, params_.n_min_points);
                }
                anxiety = apply_hazard_update(anxiety, observed, visible);
                row.hazard_capture_tick = snap ? snap->capture_tick : -1;
            } else if (method_ == Method::geometric) {
                integrate_depth_scan(obstacles, frame, ws.camera);
            }
            // e2map: frozen pre-built map, no live integration

            if (!(anxiety == last_propagated)) {
                hazard_cost = propagate_costs(anxiety, params_.gaussian);
                last_propagated = anxiety;
            }
            row.anxiety_cells = static_cast<int>(std::count_if(
                anxiety.data().begin(), anxiety.data().end(), [](std::uint8_t a) { return a > 0; }));

            const ObstacleMap inflated = inflate_obstacles(obstacles, params_.inflation_radius);
            GaussianCostMap soft_cost = hazard_cost;
            if (params_.skirt_gain > 0.0) {
                const Grid<double> clearance = euclidean_distance_cells(inflated);
                auto& soft = soft_cost.data();
                const auto& dist = clearance.data();
                for (std::size_t i = 0; i < soft.size(); ++i) {
                    if (dist[i] <= 0.0) continue;  // lethal cells handled by fusion
                    const double d = dist[i] / params_.skirt_sigma_cells;
                    soft[i] = std::max(soft[i], params_.skirt_gain * std::exp(-0.5 * d * d));
                }
            }
            GaussianCostMap fused = fuse(inflated, soft_cost);

            // keep the robot's own cell plannable so it can leave a fresh halo
            const CellIndex robot_cell = grid.grid_of(world.robot_pose().position());
            if (grid.contains(robot_cell)) {
                fused.at(robot_cell) = std::min(fused.at(robot_cell), params_.block_threshold);
            }

            if (!have_plan_state) {
                plan = planner.plan(PlanQuery{robot_cell, goal_cell, fused, params_.planner_weight,
                                              params_.block_threshold});
                have_plan_state = true;
            } else {
                std::vector<std::pair<CellIndex, double>> changed;
                const auto& prev = prev_fused.data();
                const auto& cur = fused.data();
                for (std::size_t i = 0; i < cur.size(); ++i) {
                    if (prev[i] != cur[i]) {
                        changed.push_back({CellIndex{static_cast<int>(i) / grid.cols,
                                                     static_cast<int>(i) % grid.cols},
                                           cur[i]});
                    }
                }
                plan = planner.replan(changed, robot_cell);
            }
            prev_fused = fused;

            ControlCommand command{0.0, 0.0};
            if (plan.ok()) {
                if (!(plan.path == last_path)) {
                    path_field = PathDistanceField(grid, plan.path);
                    last_path = plan.path;
                }
                RobotState state{world.robot_pose(), 0.0, 0.0};
                const auto step = mppi_step(state, nominal, fused, path_field, mppi,
                                            seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(tick));
                nominal = step.nominal;
                if (!step.stuck) command = step.command;
            }

            const auto sim_step = world.step(command);
            row.x = world.robot_pose().x;
            row.y = world.robot_pose().y;
            row.heading = world.robot_pose().heading;
            row.v_cmd = command.v;
            row.omega_cmd = command.omega;
            row.collision = sim_step.collision;
            row.min_clearance = world.min_clearance();
            record.trace.push_back(row);

            record.path_length += (world.robot_pose().position() - prev_pose.position()).norm();
            prev_pose = world.robot_pose();
            record.ticks = tick + 1;

            if (sim_step.collision) {
                record.collisions += 1;
                record.outcome = "collision";
                if (memory_) memory_->event_points.push_back(world.robot_pose().position());
                break;
            }
            if ((world.robot_pose().position() - ws.robot.goal).norm() <= ws.robot.goal_tolerance) {
                record.outcome = "goal";
                break;
            }
            frame = sim_step.frame;
        }

        record.success = record.outcome == "goal" && record.collisions == 0;
        if (final_map) *final_map = std::move(prev_fused);
        return record;
    }

private:
    Method method_;
    StackParams params_;
    std::shared_ptr<HazardBackend> backend_;
    EventMemory* memory_;
};

/// Same world travelled in the opposite direction: start at the goal facing
/// the old start, goal at the old start position.
inline WorldSpec reversed(const WorldSpec& spec) {
    WorldSpec out = spec;
    const Vec2 old_start = spec.robot.start.position();
    const Vec2 old_goal = spec.robot.goal;
    const Vec2 dir = old_start - old_goal;
    out.robot.start = {old_goal.x, old_goal.y, std::atan2(dir.y, dir.x)};
    out.robot.goal = old_start;
    return out;
}

}  // namespace haznav
