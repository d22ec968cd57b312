#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "haznav/nav_stack.hpp"
#include "haznav/sim.hpp"
#include "haznav/toml.hpp"

namespace haznav {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fully described experiment scenario: the world, its scripted dynamic
/// hazards, and the stack tuning shared by every method run on it.
struct ScenarioDef {
    WorldSpec world;
    ScenarioScript script;
    StackParams stack;
};

namespace config_detail {

inline Vec2 read_vec2(const toml::Value& v, const std::string& what) {
    if (!v.is_array() || v.array.size() != 2)
        throw ConfigError(what + ": expected [x, y]");
    return {v.array[0].as_double(), v.array[1].as_double()};
}

inline Pose2D read_pose(const toml::Value& v, const std::string& what) {
    if (!v.is_array() || (v.array.size() != 2 && v.array.size() != 3))
        throw ConfigError(what + ": expected [x, y] or [x, y, heading]");
    Pose2D p{v.array[0].as_double(), v.array[1].as_double(), 0.0};
    if (v.array.size() == 3) p.heading = normalize_angle(v.array[2].as_double());
    return p;
}

inline Polygon read_polygon(const toml::Value& v, const std::string& what) {
    if (!v.is_array() || v.array.size() < 3)
        throw ConfigError(what + ": expected at least 3 [x, y] vertices");
    Polygon poly;
    for (const auto& pt : v.array) poly.vertices.push_back(read_vec2(pt, what + " vertex"));
    return poly;
}

inline Entity read_entity(const toml::Value& t, std::size_t index) {
    const std::string where = "entity[" + std::to_string(index) + "]";
    Entity e;
    e.name = t.get_string("name", "");
    if (e.name.empty()) throw ConfigError(where + ".name: required");
    e.label = t.get_string("label", "");
    if (e.label.empty()) throw ConfigError(where + ".label: required");
    const bool has_world_polygon = t.contains("polygon");
    const bool has_local_shape = t.contains("shape");
    if (has_world_polygon == has_local_shape)
        throw ConfigError(where + ": give exactly one of 'polygon' (world frame) or 'shape' + 'pose'");
    if (has_world_polygon) {
        e.shape = read_polygon(t.at("polygon"), where + ".polygon");
    } else {
        e.shape = read_polygon(t.at("shape"), where + ".shape");
        if (t.contains("pose")) e.pose = read_pose(t.at("pose"), where + ".pose");
    }
    e.active = t.get_bool("active", true);
    e.in_prior_map = t.get_bool("in_prior_map", true);
    return e;
}

inline ScriptEvent read_event(const toml::Value& t, std::size_t index) {
    const std::string where = "event[" + std::to_string(index) + "]";
    ScriptEvent ev;
    ev.entity = t.get_string("entity", "");
    if (ev.entity.empty()) throw ConfigError(where + ".entity: required");

    const bool has_time = t.contains("trigger_time");
    const bool has_prox = t.contains("trigger_point") || t.contains("trigger_radius");
    if (has_time == has_prox)
        throw ConfigError(where + ": give exactly one of trigger_time or trigger_point+trigger_radius");
    if (has_time) {
        ev.trigger.kind = Trigger::Kind::time;
        ev.trigger.time = t.at("trigger_time").as_double();
    } else {
        ev.trigger.kind = Trigger::Kind::proximity;
        ev.trigger.point = read_vec2(t.at("trigger_point"), where + ".trigger_point");
        ev.trigger.radius = t.at("trigger_radius").as_double();
        if (ev.trigger.radius <= 0.0) throw ConfigError(where + ".trigger_radius: must be > 0");
    }

    const std::string effect = t.get_string("effect", "");
    if (effect == "rotate") {
        ev.effect.kind = Effect::Kind::rotate;
        ev.effect.angle = t.at("angle_deg").as_double() * kPi / 180.0;
        ev.effect.duration = t.get_double("duration", 0.0);
    } else if (effect == "translate") {
        ev.effect.kind = Effect::Kind::translate;
        ev.effect.offset = read_vec2(t.at("offset"), where + ".offset");
        ev.effect.duration = t.get_double("duration", 0.0);
    } else if (effect == "relabel") {
        ev.effect.kind = Effect::Kind::relabel;
        ev.effect.new_label = t.get_string("new_label", "");
        if (ev.effect.new_label.empty()) throw ConfigError(where + ".new_label: required for relabel");
    } else if (effect == "spawn") {
        ev.effect.kind = Effect::Kind::spawn;
    } else {
        throw ConfigError(where + ".effect: expected rotate|translate|relabel|spawn, got '" + effect + "'");
    }
    return ev;
}

}  // namespace config_detail

inline ScenarioDef scenario_from_toml(const toml::Value& root) {
    using namespace config_detail;
    ScenarioDef def;

    const toml::Value& world = root.at("world");
    def.world.name = world.get_string("name", "unnamed");
    def.world.dt = world.get_double("dt", 0.1);
    def.world.max_ticks = world.get_int("max_ticks", 1500);
    if (def.world.dt <= 0.0) throw ConfigError("world.dt: must be > 0");
    if (def.world.max_ticks < 1) throw ConfigError("world.max_ticks: must be >= 1");

    const toml::Value& robot = world.at("robot");
    def.world.robot.start = read_pose(robot.at("start"), "world.robot.start");
    def.world.robot.goal = read_vec2(robot.at("goal"), "world.robot.goal");
    def.world.robot.radius = robot.get_double("radius", 0.2);
    def.world.robot.v_max = robot.get_double("v_max", 0.6);
    def.world.robot.omega_max = robot.get_double("omega_max", 1.6);
    def.world.robot.goal_tolerance = robot.get_double("goal_tolerance", 0.35);

    const toml::Value& cam = world.at("camera");
    def.world.camera.width = static_cast<int>(cam.get_int("width", 240));
    def.world.camera.height = 1;
    def.world.camera.fx = cam.get_double("fx", 120.0);
    def.world.camera.fy = cam.get_double("fy", def.world.camera.fx);
    def.world.camera.cx = cam.get_double("cx", def.world.camera.width / 2.0);
    def.world.camera.cy = 0.5;
    def.world.camera.max_range = cam.get_double("max_range", 6.0);
    if (cam.contains("mount")) def.world.camera.mount = read_pose(cam.at("mount"), "world.camera.mount");
    def.world.camera.validate();

    const toml::Value& grid = world.at("grid");
    def.world.grid.rows = static_cast<int>(grid.at("rows").as_int());
    def.world.grid.cols = static_cast<int>(grid.at("cols").as_int());
    def.world.grid.resolution = grid.get_double("resolution", 0.05);
    if (grid.contains("origin")) def.world.grid.origin = read_vec2(grid.at("origin"), "world.grid.origin");
    def.world.grid.validate();

    def.world.depth_noise = world.get_bool("depth_noise", false);
    def.world.depth_noise_sigma = world.get_double("depth_noise_sigma", 0.01);

    if (root.contains("entity")) {
        const toml::Value& ents = root.at("entity");
        if (!ents.is_array()) throw ConfigError("entity: expected an array of tables ([[entity]])");
        for (std::size_t i = 0; i < ents.array.size(); ++i)
            def.world.entities.push_back(read_entity(ents.array[i], i));
    }
    if (root.contains("event")) {
        const toml::Value& evs = root.at("event");
        if (!evs.is_array()) throw ConfigError("event: expected an array of tables ([[event]])");
        for (std::size_t i = 0; i < evs.array.size(); ++i)
            def.script.push_back(read_event(evs.array[i], i));
    }
    for (const auto& ev : def.script) {
        bool found = false;
        for (const auto& e : def.world.entities) found = found || e.name == ev.entity;
        if (!found) throw ConfigError("event references unknown entity '" + ev.entity + "'");
    }

    StackParams& st = def.stack;
    st.inflation_radius = def.world.robot.radius;
    if (root.contains("stack")) {
        const toml::Value& stack = root.at("stack");
        st.planner_weight = stack.get_double("planner_weight", st.planner_weight);
        st.block_threshold = stack.get_double("block_threshold", st.block_threshold);
        st.inflation_radius = stack.get_double("inflation_radius", st.inflation_radius);
        st.hazard_latency = stack.get_double("hazard_latency", st.hazard_latency);
        st.n_min_points = static_cast<int>(stack.get_int("n_min_points", st.n_min_points));

        if (stack.contains("gaussian")) {
            const toml::Value& g = stack.at("gaussian");
            st.gaussian.sigma0 = g.get_double("sigma0", st.gaussian.sigma0);
            st.gaussian.temperature = g.get_double("temperature", st.gaussian.temperature);
            st.gaussian.sigma_min = g.get_double("sigma_min", st.gaussian.sigma_min);
            st.gaussian.truncation_epsilon = g.get_double("truncation_epsilon", st.gaussian.truncation_epsilon);
            st.gaussian.validate();
        }
        if (stack.contains("mppi")) {
            const toml::Value& m = stack.at("mppi");
            st.mppi.horizon = static_cast<int>(m.get_int("horizon", st.mppi.horizon));
            st.mppi.samples = static_cast<int>(m.get_int("samples", st.mppi.samples));
            st.mppi.lambda = m.get_double("lambda", st.mppi.lambda);
            st.mppi.sigma_v = m.get_double("sigma_v", st.mppi.sigma_v);
            st.mppi.sigma_omega = m.get_double("sigma_omega", st.mppi.sigma_omega);
            st.mppi.v_max = m.get_double("v_max", st.mppi.v_max);
            st.mppi.omega_max = m.get_double("omega_max", st.mppi.omega_max);
            st.mppi.lambda_map = m.get_double("lambda_map", st.mppi.lambda_map);
            st.mppi.lambda_path = m.get_double("lambda_path", st.mppi.lambda_path);
            st.mppi.lambda_ctrl = m.get_double("lambda_ctrl", st.mppi.lambda_ctrl);
            st.mppi.lambda_goal = m.get_double("lambda_goal", st.mppi.lambda_goal);
            st.mppi.c_block = m.get_double("c_block", st.mppi.c_block);
            st.mppi.validate();
        }
    }

    if (root.contains("fixture")) {
        const toml::Value& fx = root.at("fixture");
        if (!fx.is_array()) throw ConfigError("fixture: expected an array of tables ([[fixture]])");
        for (std::size_t i = 0; i < fx.array.size(); ++i) {
            const toml::Value& f = fx.array[i];
            HazardFixture hf;
            hf.label = f.get_string("label", "");
            if (hf.label.empty())
                throw ConfigError("fixture[" + std::to_string(i) + "].label: required");
            hf.anxiety = static_cast<int>(f.get_int("anxiety", 1));
            if (hf.anxiety < 1 || hf.anxiety > 3)
                throw ConfigError("fixture[" + std::to_string(i) + "].anxiety: must be 1..3");
            hf.reasoning = f.get_string("reasoning", "");
            hf.justification = f.get_string("justification", "");
            st.fixtures.push_back(std::move(hf));
        }
    }

    return def;
}

inline ScenarioDef load_scenario(const std::string& path) {
    try {
        return scenario_from_toml(toml::parse_file(path));
    } catch (const toml::ParseError& e) {
        throw ConfigError(path + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace haznav
