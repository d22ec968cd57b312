#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "haznav/cost_map.hpp"
#include "haznav/geometry.hpp"
#include "haznav/grid.hpp"
#include "haznav/hazard_pipeline.hpp"
#include "haznav/mppi.hpp"
#include "haznav/perception.hpp"

namespace haznav {

/// A world object: a polygon shape in its local frame placed at a pose.
/// `in_prior_map` marks geometry that existed when the environment was first
/// mapped (used by baselines that plan on a pre-built map); `active` gates
/// rendering and collision (spawn effects flip it on).
struct Entity {
    std::string name;
    std::string label;
    Polygon shape;  // local frame; motion effects rotate about the local origin
    Pose2D pose;
    bool active{true};
    bool in_prior_map{true};

    Polygon world_polygon() const {
        Polygon p;
        p.vertices.reserve(shape.vertices.size());
        for (const auto& v : shape.vertices) p.vertices.push_back(pose.transform(v));
        return p;
    }
};

struct Trigger {
    enum class Kind { time, proximity };
    Kind kind{Kind::time};
    double time{0.0};     // kind == time: fires when sim time >= time
    Vec2 point{};         // kind == proximity: fires when robot within radius of point
    double radius{0.0};

    bool satisfied(double t, const Vec2& robot) const {
        if (kind == Kind::time) return t >= time;
        return (robot - point).norm() <= radius;
    }
};

struct Effect {
    enum class Kind { rotate, translate, relabel, spawn };
    Kind kind{Kind::relabel};
    double angle{0.0};      // rotate: total sweep (radians)
    Vec2 offset{};          // translate: total displacement (meters)
    double duration{0.0};   // rotate/translate: seconds for the full motion
    std::string new_label;  // relabel
};

struct ScriptEvent {
    std::string entity;
    Trigger trigger;
    Effect effect;
};

using ScenarioScript = std::vector<ScriptEvent>;

struct RobotSpec {
    Pose2D start;
    Vec2 goal;
    double radius{0.2};
    double v_max{0.6};
    double omega_max{1.6};
    double goal_tolerance{0.35};
};

struct WorldSpec {
    std::string name;
    std::vector<Entity> entities;
    RobotSpec robot;
    CameraModel camera;
    GridSpec grid;          // the map frame shared by the whole stack
    double dt{0.1};
    long max_ticks{1500};
    std::uint64_t seed{0};
    bool depth_noise{false};
    double depth_noise_sigma{0.01};  // fraction of range
};

struct SensorFrame {
    SceneImage image;
    DepthImage depth;
    Pose2D pose;  // ground-truth robot pose (simulator-provided localization)
    double timestamp{0.0};
    long tick{0};
};

/// Deterministic 2D world: scripted entities, unicycle robot, and a 1D
/// raycast depth+semantic scan (one ray per image column) standing in for a
/// full RGB-D frame behind the same interfaces.
class World {
public:
    World(WorldSpec spec, ScenarioScript script)
        : spec_(std::move(spec)), script_(std::move(script)), rng_(spec_.seed) {
        reset();
    }

    void reset() {
        entities_ = spec_.entities;
        robot_pose_ = spec_.robot.start;
        cmd_ = {0.0, 0.0};
        time_ = 0.0;
        tick_ = 0;
        rng_.seed(spec_.seed);
        fired_.assign(script_.size(), FiredState{});
        apply_motions();
    }

    const WorldSpec& spec() const { return spec_; }
    const std::vector<Entity>& entities() const { return entities_; }
    const Pose2D& robot_pose() const { return robot_pose_; }
    double time() const { return time_; }
    long tick() const { return tick_; }

    /// Smallest clearance between the robot disc and any active entity
    /// outline (negative means overlap).
    double min_clearance() const {
        double best = std::numeric_limits<double>::infinity();
        const Vec2 p = robot_pose_.position();
        for (const auto& e : entities_) {
            if (!e.active) continue;
            const Polygon poly = e.world_polygon();
            if (poly.empty()) continue;
            double d = poly.distance_to_boundary(p);
            if (poly.contains(p)) d = -d;
            best = std::min(best, d - spec_.robot.radius);
        }
        return best;
    }

    bool in_collision() const { return min_clearance() <= 0.0; }

    struct StepResult {
        SensorFrame frame;
        bool collision{false};
    };

    /// Advances dynamics by dt, fires due scenario triggers, progresses
    /// scripted motions, then reports collision and the new sensor frame.
    StepResult step(const ControlCommand& command) {
        cmd_.v = std::clamp(command.v, -spec_.robot.v_max, spec_.robot.v_max);
        cmd_.omega = std::clamp(command.omega, -spec_.robot.omega_max, spec_.robot.omega_max);
        robot_pose_ = unicycle_step(robot_pose_, cmd_.v, cmd_.omega, spec_.dt);
        time_ += spec_.dt;
        ++tick_;

        fire_triggers();
        apply_motions();

        StepResult out;
        out.collision = in_collision();
        out.frame = render();
        return out;
    }

    /// Renders the current sensor frame without advancing time.
    SensorFrame render() {
        SensorFrame frame;
        frame.pose = robot_pose_;
        frame.timestamp = time_;
        frame.tick = tick_;

        const CameraModel& cam = spec_.camera;
        const Pose2D cam_pose = robot_pose_.compose(cam.mount);
        const int w = cam.width;

        frame.depth.width = w;
        frame.depth.height = 1;
        frame.depth.range.assign(static_cast<std::size_t>(w), 0.0);

        frame.image.timestamp = time_;
        frame.image.tick = tick_;
        frame.image.width = w;
        frame.image.height = 1;
        frame.image.semantic.assign(static_cast<std::size_t>(w), -1);
        frame.image.rgb.assign(static_cast<std::size_t>(w) * 3, 0);

        // per-frame label table over active entities, sorted for determinism
        std::map<std::string, int> label_ids;
        for (const auto& e : entities_)
            if (e.active) label_ids.emplace(e.label, 0);
        frame.image.label_names.reserve(label_ids.size());
        for (auto& [label, id] : label_ids) {
            id = static_cast<int>(frame.image.label_names.size());
            frame.image.label_names.push_back(label);
        }

        std::normal_distribution<double> noise(0.0, 1.0);
        for (int u = 0; u < w; ++u) {
            const double bearing = cam.bearing_of_column(u);
            const double a = cam_pose.heading + bearing;
            const Vec2 dir{std::cos(a), std::sin(a)};
            double best = std::numeric_limits<double>::infinity();
            const Entity* hit = nullptr;
            for (const auto& e : entities_) {
                if (!e.active) continue;
                const auto t = e.world_polygon().raycast(cam_pose.position(), dir);
                if (t && *t < best) {
                    best = *t;
                    hit = &e;
                }
            }
            if (hit && best <= cam.max_range) {
                double r = best;
                if (spec_.depth_noise) {
                    r = std::max(1e-3, r * (1.0 + spec_.depth_noise_sigma * noise(rng_)));
                }
                frame.depth.range[u] = r;
                frame.image.semantic[u] = label_ids.at(hit->label);
                const auto color = label_color(hit->label);
                frame.image.rgb[u * 3 + 0] = color[0];
                frame.image.rgb[u * 3 + 1] = color[1];
                frame.image.rgb[u * 3 + 2] = color[2];
            }
        }
        return frame;
    }

    /// Obstacle map of the world as initially mapped: only entities flagged
    /// in_prior_map, at their initial poses.
    ObstacleMap prior_obstacle_map() const {
        ObstacleMap map(spec_.grid, 0);
        std::vector<Polygon> polys;
        for (const auto& e : spec_.entities) {
            if (e.active && e.in_prior_map) polys.push_back(e.world_polygon());
        }
        rasterize(polys, map);
        return map;
    }

    /// Ground-truth obstacle map of the current world state (diagnostics).
    ObstacleMap true_obstacle_map() const {
        ObstacleMap map(spec_.grid, 0);
        std::vector<Polygon> polys;
        for (const auto& e : entities_) {
            if (e.active) polys.push_back(e.world_polygon());
        }
        rasterize(polys, map);
        return map;
    }

private:
    struct FiredState {
        bool fired{false};
        double fire_time{0.0};
        Pose2D start_pose{};
        std::string start_label;
    };

    void fire_triggers() {
        for (std::size_t i = 0; i < script_.size(); ++i) {
            if (fired_[i].fired) continue;
            if (!script_[i].trigger.satisfied(time_, robot_pose_.position())) continue;
            Entity* e = find_entity(script_[i].entity);
            if (!e) throw std::runtime_error("scenario event references unknown entity: " + script_[i].entity);
            fired_[i].fired = true;
            fired_[i].fire_time = time_;
            fired_[i].start_pose = e->pose;
            fired_[i].start_label = e->label;
            if (script_[i].effect.kind == Effect::Kind::relabel) {
                e->label = script_[i].effect.new_label;
            } else if (script_[i].effect.kind == Effect::Kind::spawn) {
                e->active = true;
            }
        }
    }

    void apply_motions() {
        for (std::size_t i = 0; i < script_.size(); ++i) {
            if (!fired_[i].fired) continue;
            const Effect& fx = script_[i].effect;
            if (fx.kind != Effect::Kind::rotate && fx.kind != Effect::Kind::translate) continue;
            Entity* e = find_entity(script_[i].entity);
            const double progress = fx.duration <= 0.0
                                        ? 1.0
                                        : std::clamp((time_ - fired_[i].fire_time) / fx.duration, 0.0, 1.0);
            if (fx.kind == Effect::Kind::rotate) {
                e->pose = fired_[i].start_pose;
                e->pose.heading = normalize_angle(fired_[i].start_pose.heading + progress * fx.angle);
            } else {
                e->pose = fired_[i].start_pose;
                e->pose.x += progress * fx.offset.x;
                e->pose.y += progress * fx.offset.y;
            }
        }
    }

    Entity* find_entity(const std::string& name) {
        for (auto& e : entities_)
            if (e.name == name) return &e;
        return nullptr;
    }

    void rasterize(const std::vector<Polygon>& polys, ObstacleMap& map) const {
        const GridSpec& g = map.spec();
        const double half = g.resolution / 2.0;
        for (int r = 0; r < g.rows; ++r) {
            for (int c = 0; c < g.cols; ++c) {
                const Vec2 center = g.world_of({r, c});
                for (const auto& p : polys) {
                    if (p.contains(center) || p.distance_to_boundary(center) <= half) {
                        map.at(r, c) = 1;
                        break;
                    }
                }
            }
        }
    }

    static std::array<std::uint8_t, 3> label_color(const std::string& label) {
        std::uint32_t h = 2166136261u;
        for (unsigned char ch : label) h = (h ^ ch) * 16777619u;
        return {static_cast<std::uint8_t>(64 + (h & 0x7F)),
                static_cast<std::uint8_t>(64 + ((h >> 8) & 0x7F)),
                static_cast<std::uint8_t>(64 + ((h >> 16) & 0x7F))};
    }

    WorldSpec spec_;
    ScenarioScript script_;
    std::vector<Entity> entities_;
    Pose2D robot_pose_;
    ControlCommand cmd_{};
    double time_{0.0};
    long tick_{0};
    std::mt19937_64 rng_;
    std::vector<FiredState> fired_;
};

/// Per-tick record of a closed-loop run.
struct TraceRow {
    long tick{0};
    double time{0.0};
    double x{0.0};
    double y{0.0};
    double heading{0.0};
    double v_cmd{0.0};
    double omega_cmd{0.0};
    bool collision{false};
    long hazard_capture_tick{-1};  // tick index of the L_t in use (-1 = none yet)
    int anxiety_cells{0};
    double min_clearance{0.0};
};

struct RunRecord {
    bool success{false};
    int collisions{0};
    double path_length{0.0};
    long ticks{0};
    std::string outcome;  // goal | collision | timeout | no_path
    std::vector<TraceRow> trace;
};

}  // namespace haznav
