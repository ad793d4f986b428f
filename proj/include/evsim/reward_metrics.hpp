#pragma once

#include <optional>
#include <vector>

#include "evsim/common.hpp"
#include "evsim/scene_forest.hpp"

namespace evsim {

struct QuadState {
    Vec3 velocity;   // m/s, z component is v_z
    Vec3 position;   // m
    double yaw = 0.0;  // rad; heading is the horizontal unit vector of yaw

    Vec3 heading() const { return {std::cos(yaw), std::sin(yaw), 0.0}; }
};

struct CommandInput {
    Vec3 v_cmd;  // commanded direction, magnitude = target speed

    void validate() const {
        if (v_cmd.norm() <= 0.0) throw ValidationError("command magnitude must be > 0");
    }
};

struct ActionCommand {
    double thrust = 0.0;  // normalized collective thrust
    Vec3 body_rates;      // normalized body-rate action

    void validate() const {
        auto in_range = [](double v) { return std::isfinite(v) && v >= -1.0 && v <= 1.0; };
        if (!in_range(thrust) || !in_range(body_rates.x) || !in_range(body_rates.y) ||
            !in_range(body_rates.z))
            throw ValidationError("action components must lie in [-1, 1]");
    }
};

struct Obstacle {
    double distance = 0.0;  // surface distance, m
    double bearing = 0.0;   // rad, wrapped to (-pi, pi]
};
using ObstacleSet = std::vector<Obstacle>;

struct RewardWeights {
    double prog = 1.0, act = 1.0, br = 1.0, perc = 1.0, obs_dist = 1.0, crash = 1.0;

    void validate() const {
        for (double v : {prog, act, br, perc, obs_dist, crash})
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError("reward weights must be finite and >= 0");
    }
};

struct RewardBreakdown {
    double prog = 0.0, act = 0.0, br = 0.0, perc = 0.0, obs_dist = 0.0, crash = 0.0;
    double total = 0.0;
};

struct EpisodeStats {
    bool success = false;
    double distance_along_command = 0.0;  // m
    double mean_velocity = 0.0;           // m/s
    std::optional<std::size_t> crash_step;
};

struct EpisodeConfig {
    double quad_radius = 0.15;
    double success_threshold = 40.0;
    double ground_z = 0.1;
    double ceiling_z = 30.0;
};

RewardBreakdown compute_reward(const QuadState& state, const CommandInput& cmd,
                               const ActionCommand& action, const ActionCommand& prev_action,
                               const ObstacleSet& obstacles, bool crash,
                               const RewardWeights& weights);

// Obstacles within half_fov of the yaw direction and closer than max_range.
ObstacleSet visible_obstacles(const ForestScene& scene, const QuadState& state,
                              double max_range, double half_fov = deg2rad(60.0));

EpisodeStats evaluate_episode(const ForestScene& scene, const CameraTrajectory& traj,
                              const CommandInput& cmd, const EpisodeConfig& cfg);

}  // namespace evsim
