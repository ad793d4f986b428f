#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "evsim/common.hpp"
#include "evsim/event_core.hpp"

namespace evsim {

struct WorldBox {
    double x_min = 0.0, x_max = 100.0;
    double y_min = 0.0, y_max = 100.0;
    double height = 30.0;

    bool contains_xy(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
    double area() const { return (x_max - x_min) * (y_max - y_min); }
};

struct Cylinder {
    double x = 0.0, y = 0.0;
    double radius = 0.3;
    double albedo = 0.5;
};

struct ForestScene {
    WorldBox world_box;
    std::vector<Cylinder> cylinders;
    double background_albedo = 0.4;
    std::uint64_t seed = 0;
};

struct PoissonConfig {
    double delta = 0.04;  // expected trees per square meter
    double r_min = 0.2, r_max = 0.5;
    WorldBox world_box;
    double min_clearance = 2.0;  // free radius around the start position

    void validate() const;
};

struct CameraPose {
    Vec3 position;
    double yaw = 0.0;    // rad, wrapped to (-pi, pi]
    double pitch = 0.0;  // rad
    double roll = 0.0;   // rad
    double time = 0.0;   // s
};

struct CameraTrajectory {
    std::vector<CameraPose> poses;
    double frame_period = 0.01;

    void validate() const;
};

struct RenderConfig {
    std::size_t width = 320, height = 240;
    double horizontal_fov = deg2rad(90.0);
    double max_range = 50.0;
    double epsilon = 1e-3;  // log-transform guard

    void validate() const;
    double focal_pixels() const;
};

struct DepthStack {
    std::size_t t = 0, h = 0, w = 0;
    std::vector<float> depths;  // meters, max_range where no hit
    double frame_period = 0.0;

    float at(std::size_t ti, std::size_t y, std::size_t x) const {
        return depths[(ti * h + y) * w + x];
    }
};

struct DistanceMap {
    std::vector<double> bins;  // meters, clamped to max_range
    double bin_span = deg2rad(11.25);
};

// Three horizontal image bands, row-major [band][interval].
struct BandedDistanceMap {
    std::size_t intervals = 0;
    std::vector<double> bands;  // size 3 * intervals

    double at(std::size_t band, std::size_t i) const { return bands[band * intervals + i]; }
};

struct RenderResult {
    LogFrameStack log_frames;
    DepthStack depth;
    std::vector<float> intensities;  // linear [0,1], same layout as log_frames
};

// Trajectory shapes; constant speed, yaw follows the velocity direction.
struct StraightSpec {
    Vec3 start;
    double heading = 0.0;  // rad
    double length = 0.0;   // m
};
struct ArcSpec {
    Vec3 start;
    double heading = 0.0;    // initial heading, rad
    double curvature = 0.0;  // 1/m, signed; 0 degenerates to a straight line
    double length = 0.0;     // arc length, m
};
struct WaypointSpec {
    std::vector<Vec3> waypoints;
};
using TrajectorySpec = std::variant<StraightSpec, ArcSpec, WaypointSpec>;

// Homogeneous Poisson point process over the world box; trees blocking the
// start clearance disk (center of the left edge) are removed.
ForestScene sample_forest(const PoissonConfig& cfg, std::uint64_t seed);

// Minimum surface distance over cylinders visible within [bearing_lo,
// bearing_hi] (world-frame bearings), clamped to max_range.
double min_obstacle_distance(const ForestScene& scene, double x, double y,
                             double bearing_lo, double bearing_hi, double max_range);

RenderResult render_frames(const ForestScene& scene, const CameraTrajectory& traj,
                           const RenderConfig& cfg, unsigned num_threads = 1);

// Gravity-aligned angular distance map: bins laid symmetrically around the
// pose yaw in the horizontal plane, index 0 leftmost.
DistanceMap teacher_distance_map(const ForestScene& scene, const CameraPose& pose,
                                 std::size_t num_bins, double bin_span, double max_range);

// Image-band distance map: 3 equal-height bands (remainder rows to the
// bottom band), per-band minimum depth within angular column intervals.
BandedDistanceMap student_distance_map(const DepthStack& depth, std::size_t frame,
                                       const RenderConfig& cfg, std::size_t num_intervals,
                                       double interval_span);

CameraTrajectory make_trajectory(const TrajectorySpec& spec, double speed, double frame_rate);

// Upper bound on per-frame pixel displacement: every pixel's 3-D hit point
// is re-projected through the next pose and the max image-space shift is
// taken over all steps.
double check_flow_bound(const DepthStack& depth, const CameraTrajectory& traj,
                        const RenderConfig& cfg);

// Camera basis from yaw/pitch/roll (intrinsic z-y-x). Forward is +x at
// identity, z up.
struct CameraBasis {
    Vec3 forward, right, up;
    static CameraBasis from_pose(const CameraPose& pose);
};

}  // namespace evsim
