#include "evsim/reward_metrics.hpp"

#include <algorithm>
#include <cmath>

namespace evsim {

RewardBreakdown compute_reward(const QuadState& state, const CommandInput& cmd,
                               const ActionCommand& action, const ActionCommand& prev_action,
                               const ObstacleSet& obstacles, bool crash,
                               const RewardWeights& weights) {
    cmd.validate();
    action.validate();
    prev_action.validate();
    weights.validate();

    RewardBreakdown r;
    const Vec3& v = state.velocity;
    const Vec3& vc = cmd.v_cmd;
    double vc_norm = vc.norm();
    double v_norm = v.norm();

    r.prog = std::tanh(v.dot(vc) / vc_norm + 1.0) *
                 std::tanh(vc_norm - (v - vc).norm() + 1.0) *
                 0.25 * std::min(v_norm / vc_norm, 1.0) -
             std::abs(v.z);

    double dthrust = action.thrust - prev_action.thrust;
    Vec3 drates = action.body_rates - prev_action.body_rates;
    r.act = -std::sqrt(dthrust * dthrust + drates.dot(drates));
    r.br = -action.body_rates.norm();

    Vec3 heading = state.heading();
    r.perc = vc.dot(heading) / (vc_norm * heading.norm());

    if (!obstacles.empty()) {
        double sum = 0.0;
        for (const Obstacle& o : obstacles) {
            double dyaw = wrap_angle(state.yaw - o.bearing);
            sum += std::exp(-o.distance - dyaw * dyaw);
        }
        r.obs_dist = -sum / static_cast<double>(obstacles.size());
    }

    r.crash = crash ? -v_norm - 1.0 : 0.0;

    r.total = weights.prog * r.prog + weights.act * r.act + weights.br * r.br +
              weights.perc * r.perc + weights.obs_dist * r.obs_dist + weights.crash * r.crash;
    return r;
}

ObstacleSet visible_obstacles(const ForestScene& scene, const QuadState& state,
                              double max_range, double half_fov) {
    ObstacleSet out;
    for (const Cylinder& c : scene.cylinders) {
        double dx = c.x - state.position.x;
        double dy = c.y - state.position.y;
        double dc = std::hypot(dx, dy);
        double surface = std::max(0.0, dc - c.radius);
        if (surface >= max_range) continue;
        double bearing = std::atan2(dy, dx);
        if (std::abs(wrap_angle(bearing - state.yaw)) > half_fov) continue;
        out.push_back({surface, wrap_angle(bearing)});
    }
    return out;
}

namespace {

bool pose_crashes(const ForestScene& scene, const CameraPose& pose, const EpisodeConfig& cfg) {
    const Vec3& p = pose.position;
    if (!scene.world_box.contains_xy(p.x, p.y)) return true;
    if (p.z <= cfg.ground_z || p.z >= cfg.ceiling_z) return true;
    for (const Cylinder& c : scene.cylinders) {
        if (std::hypot(p.x - c.x, p.y - c.y) - c.radius < cfg.quad_radius) return true;
    }
    return false;
}

}  // namespace

EpisodeStats evaluate_episode(const ForestScene& scene, const CameraTrajectory& traj,
                              const CommandInput& cmd, const EpisodeConfig& cfg) {
    traj.validate();
    cmd.validate();

    EpisodeStats stats;
    std::size_t end = traj.poses.size() - 1;  // index of the last evaluated pose
    for (std::size_t i = 0; i < traj.poses.size(); ++i) {
        if (pose_crashes(scene, traj.poses[i], cfg)) {
            stats.crash_step = i;
            end = i;
            break;
        }
    }

    Vec3 cmd_dir = cmd.v_cmd.normalized();
    const Vec3& start = traj.poses.front().position;
    stats.distance_along_command = (traj.poses[end].position - start).dot(cmd_dir);

    double path_length = 0.0;
    for (std::size_t i = 1; i <= end; ++i)
        path_length += (traj.poses[i].position - traj.poses[i - 1].position).norm();
    double elapsed = traj.poses[end].time - traj.poses.front().time;
    stats.mean_velocity = elapsed > 0.0 ? path_length / elapsed : 0.0;

    stats.success = !stats.crash_step.has_value() &&
                    stats.distance_along_command > cfg.success_threshold;
    return stats;
}

}  // namespace evsim
