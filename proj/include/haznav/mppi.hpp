#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "haznav/cost_map.hpp"
#include "haznav/distance_transform.hpp"
#include "haznav/dstar_lite.hpp"
#include "haznav/geometry.hpp"
#include "haznav/grid.hpp"

namespace haznav {

/// One Euler step of unicycle dynamics.
inline Pose2D unicycle_step(const Pose2D& pose, double v, double omega, double dt) {
    return {pose.x + v * std::cos(pose.heading) * dt,
            pose.y + v * std::sin(pose.heading) * dt,
            normalize_angle(pose.heading + omega * dt)};
}

struct RobotState {
    Pose2D pose;
    double v{0.0};
    double omega{0.0};
};

struct ControlCommand {
    double v{0.0};
    double omega{0.0};
};

struct ControlSequence {
    std::vector<ControlCommand> commands;
    double dt{0.1};
};

struct MppiParams {
    int horizon{30};
    int samples{256};
    double dt{0.1};
    double lambda{1.0};     // softmin temperature
    double sigma_v{0.15};   // control noise std devs
    double sigma_omega{0.5};
    double v_max{0.6};
    double omega_max{1.6};
    double lambda_map{20.0};
    double lambda_path{4.0};
    double lambda_ctrl{0.05};
    double c_block{1000.0};
    double block_threshold{0.99};
    /// Optional per-step goal-distance term. Zero leaves the cost purely
    /// map + path + control; the closed-loop stack turns it on so rollouts
    /// that make progress along the path win over standing still.
    double lambda_goal{0.0};
    Vec2 goal{};

    void validate() const {
        if (horizon < 1) throw std::invalid_argument("MppiParams: horizon must be >= 1");
        if (samples < 1) throw std::invalid_argument("MppiParams: samples must be >= 1");
        if (!(lambda > 0.0)) throw std::invalid_argument("MppiParams: lambda must be > 0");
        if (!(dt > 0.0)) throw std::invalid_argument("MppiParams: dt must be > 0");
    }

    ControlCommand clamp(const ControlCommand& c) const {
        return {std::clamp(c.v, -v_max, v_max), std::clamp(c.omega, -omega_max, omega_max)};
    }
};

/// Euclidean distance (meters) from any world point to the nearest cell of a
/// planned path, precomputed so rollouts cost O(1) per step.
class PathDistanceField {
public:
    PathDistanceField() = default;

    PathDistanceField(const GridSpec& spec, const std::vector<CellIndex>& path_cells) : spec_(spec) {
        Grid<std::uint8_t> seeds(spec, 0);
        for (const auto& c : path_cells)
            if (spec.contains(c)) seeds.at(c) = 1;
        field_ = euclidean_distance_cells(seeds);
        for (auto& v : field_.data()) v *= spec.resolution;
        valid_ = !path_cells.empty();
    }

    bool valid() const { return valid_; }

    /// Distance in meters; queries outside the map clamp to the border cell.
    double distance(const Vec2& world) const {
        if (!valid_) return 0.0;
        CellIndex c = spec_.grid_of(world);
        c.row = std::clamp(c.row, 0, spec_.rows - 1);
        c.col = std::clamp(c.col, 0, spec_.cols - 1);
        return field_.at(c);
    }

private:
    GridSpec spec_{};
    Grid<double> field_{};
    bool valid_{false};
};

/// Simulates unicycle dynamics for the sequence and accumulates
///   lambda_map * map(cell) + lambda_path * dist_to_path + lambda_ctrl * (v^2 + w^2)
/// per step, plus c_block whenever the rollout enters a blocked (or
/// out-of-map) cell. Returns the total and whether any step was blocked.
struct RolloutCost {
    double total{0.0};
    bool blocked{false};
};

inline RolloutCost rollout_cost_detail(const RobotState& state, const ControlSequence& controls,
                                       const GaussianCostMap& map, const PathDistanceField& path_field,
                                       const MppiParams& params) {
    RolloutCost rc;
    Pose2D pose = state.pose;
    for (const auto& raw : controls.commands) {
        const ControlCommand cmd = params.clamp(raw);
        pose = unicycle_step(pose, cmd.v, cmd.omega, controls.dt);
        const CellIndex cell = map.spec().grid_of(pose.position());
        double map_cost = 1.0;
        bool blocked_here = true;
        if (map.spec().contains(cell)) {
            map_cost = map.at(cell);
            blocked_here = map_cost >= params.block_threshold;
        }
        rc.total += params.lambda_map * map_cost;
        rc.total += params.lambda_path * path_field.distance(pose.position());
        rc.total += params.lambda_ctrl * (cmd.v * cmd.v + cmd.omega * cmd.omega);
        if (params.lambda_goal > 0.0) {
            rc.total += params.lambda_goal * (pose.position() - params.goal).norm();
        }
        if (blocked_here) {
            rc.total += params.c_block;
            rc.blocked = true;
        }
    }
    return rc;
}

inline double rollout_cost(const RobotState& state, const ControlSequence& controls,
                           const GaussianCostMap& map, const PathDistanceField& path_field,
                           const MppiParams& params) {
    return rollout_cost_detail(state, controls, map, path_field, params).total;
}

/// Convenience overload building the path field from a plan.
inline double rollout_cost(const RobotState& state, const ControlSequence& controls,
                           const GaussianCostMap& map, const PlanResult& path,
                           const MppiParams& params) {
    return rollout_cost(state, controls, map, PathDistanceField(map.spec(), path.path), params);
}

struct MppiStepResult {
    ControlCommand command;
    ControlSequence nominal;   // shifted, to warm-start the next step
    ControlSequence averaged;  // the unshifted weighted-average sequence
    bool stuck{false};
    double best_cost{0.0};
    std::vector<double> weights;  // importance weights, sum 1 (diagnostics)
};

/// One path-integral update: sample K noise-perturbed control sequences,
/// weight them by exp(-(cost - min)/lambda), return the weighted average's
/// first command and the shifted average as the new nominal. Deterministic
/// for a fixed seed. When every rollout is blocked the controller reports
/// Stuck and commands a stop.
inline MppiStepResult mppi_step(const RobotState& state, const ControlSequence& nominal,
                                const GaussianCostMap& map, const PathDistanceField& path_field,
                                const MppiParams& params, std::uint64_t seed) {
    params.validate();
    const int h = params.horizon;
    const int k = params.samples;

    ControlSequence base = nominal;
    base.dt = params.dt;
    base.commands.resize(h, base.commands.empty() ? ControlCommand{} : base.commands.back());

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise_v(0.0, 1.0);
    std::normal_distribution<double> noise_w(0.0, 1.0);

    std::vector<ControlSequence> candidates(k, base);
    std::vector<double> costs(k, 0.0);
    std::vector<bool> blocked(k, false);
    for (int i = 0; i < k; ++i) {
        auto& cand = candidates[i];
        for (int t = 0; t < h; ++t) {
            const double ev = params.sigma_v > 0.0 ? params.sigma_v * noise_v(rng) : 0.0;
            const double ew = params.sigma_omega > 0.0 ? params.sigma_omega * noise_w(rng) : 0.0;
            cand.commands[t] = params.clamp({base.commands[t].v + ev, base.commands[t].omega + ew});
        }
        const RolloutCost rc = rollout_cost_detail(state, cand, map, path_field, params);
        costs[i] = rc.total;
        blocked[i] = rc.blocked;
    }

    MppiStepResult result;
    if (std::all_of(blocked.begin(), blocked.end(), [](bool b) { return b; })) {
        result.command = {0.0, 0.0};
        // drop the committed sequence: sampling around a nominal that dives
        // into a blocked region would stay blocked forever
        result.nominal = ControlSequence{std::vector<ControlCommand>(h), params.dt};
        result.averaged = result.nominal;
        result.stuck = true;
        result.best_cost = *std::min_element(costs.begin(), costs.end());
        return result;
    }

    const double c_min = *std::min_element(costs.begin(), costs.end());
    result.weights.resize(k);
    double norm = 0.0;
    for (int i = 0; i < k; ++i) {
        result.weights[i] = std::exp(-(costs[i] - c_min) / params.lambda);
        norm += result.weights[i];
    }
    for (auto& w : result.weights) w /= norm;

    ControlSequence averaged = base;
    for (int t = 0; t < h; ++t) {
        double v = 0.0, w = 0.0;
        for (int i = 0; i < k; ++i) {
            v += result.weights[i] * candidates[i].commands[t].v;
            w += result.weights[i] * candidates[i].commands[t].omega;
        }
        averaged.commands[t] = params.clamp({v, w});
    }

    result.command = averaged.commands.front();
    result.best_cost = c_min;
    result.averaged = averaged;
    // shift: drop the executed command, repeat the last one
    result.nominal = averaged;
    for (int t = 0; t + 1 < h; ++t) result.nominal.commands[t] = averaged.commands[t + 1];
    return result;
}

}  // namespace haznav
