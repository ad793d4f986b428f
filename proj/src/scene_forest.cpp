#include "evsim/scene_forest.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "evsim/parallel.hpp"
#include "evsim/rng.hpp"

namespace evsim {

void PoissonConfig::validate() const {
    if (delta < 0.0) throw ValidationError("delta must be >= 0");
    if (!(r_min > 0.0) || r_min > r_max) throw ValidationError("need 0 < r_min <= r_max");
    if (world_box.x_max <= world_box.x_min || world_box.y_max <= world_box.y_min)
        throw ValidationError("world box must have positive extent");
    if (min_clearance < 0.0) throw ValidationError("min_clearance must be >= 0");
}

void CameraTrajectory::validate() const {
    if (poses.empty()) throw ValidationError("trajectory must contain at least one pose");
    if (frame_period <= 0.0) throw ValidationError("frame_period must be > 0");
    for (std::size_t i = 1; i < poses.size(); ++i) {
        double dt = poses[i].time - poses[i - 1].time;
        if (dt <= 0.0 || std::abs(dt - frame_period) > 1e-9)
            throw ValidationError("trajectory times must increase by frame_period");
    }
}

void RenderConfig::validate() const {
    if (width < 1 || height < 1) throw ValidationError("image dimensions must be >= 1");
    if (!(horizontal_fov > 0.0) || horizontal_fov >= kPi)
        throw ValidationError("horizontal_fov must lie in (0, pi)");
    if (!(max_range > 0.0)) throw ValidationError("max_range must be > 0");
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
}

double RenderConfig::focal_pixels() const {
    return (static_cast<double>(width) / 2.0) / std::tan(horizontal_fov / 2.0);
}

namespace {

struct Mat3 {
    std::array<std::array<double, 3>, 3> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k) r.m[i][j] += m[i][k] * o.m[k][j];
        return r;
    }
    Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
};

Mat3 rot_z(double a) {
    Mat3 r = Mat3::identity();
    r.m[0][0] = std::cos(a);
    r.m[0][1] = -std::sin(a);
    r.m[1][0] = std::sin(a);
    r.m[1][1] = std::cos(a);
    return r;
}
Mat3 rot_y(double a) {
    Mat3 r = Mat3::identity();
    r.m[0][0] = std::cos(a);
    r.m[0][2] = std::sin(a);
    r.m[2][0] = -std::sin(a);
    r.m[2][2] = std::cos(a);
    return r;
}
Mat3 rot_x(double a) {
    Mat3 r = Mat3::identity();
    r.m[1][1] = std::cos(a);
    r.m[1][2] = -std::sin(a);
    r.m[2][1] = std::sin(a);
    r.m[2][2] = std::cos(a);
    return r;
}

struct Hit {
    double range = -1.0;
    double intensity = 0.0;
    bool valid() const { return range > 0.0; }
};

constexpr double kSkyIntensity = 0.9;
constexpr double kRayEps = 1e-9;

Hit intersect_scene(const ForestScene& scene, const Vec3& origin, const Vec3& dir) {
    Hit best;
    // cylinders (vertical, spanning [0, world height])
    double a = dir.x * dir.x + dir.y * dir.y;
    if (a > 1e-14) {
        for (const Cylinder& c : scene.cylinders) {
            double ox = origin.x - c.x;
            double oy = origin.y - c.y;
            double b = 2.0 * (ox * dir.x + oy * dir.y);
            double c0 = ox * ox + oy * oy - c.radius * c.radius;
            double disc = b * b - 4.0 * a * c0;
            if (disc < 0.0) continue;
            double sq = std::sqrt(disc);
            double t = (-b - sq) / (2.0 * a);
            if (t < kRayEps) t = (-b + sq) / (2.0 * a);
            if (t < kRayEps) continue;
            double hz = origin.z + t * dir.z;
            if (hz < 0.0 || hz > scene.world_box.height) continue;
            if (best.valid() && t >= best.range) continue;
            double nx = (origin.x + t * dir.x - c.x) / c.radius;
            double ny = (origin.y + t * dir.y - c.y) / c.radius;
            double cosi = std::max(0.0, -(nx * dir.x + ny * dir.y));
            best.range = t;
            best.intensity = c.albedo * (0.5 + 0.5 * cosi);
        }
    }
    // ground plane z = 0
    if (dir.z < -1e-12) {
        double t = -origin.z / dir.z;
        if (t > kRayEps && (!best.valid() || t < best.range)) {
            double cosi = std::max(0.0, -dir.z);
            best.range = t;
            best.intensity = scene.background_albedo * (0.5 + 0.5 * cosi);
        }
    }
    return best;
}

void validate_pose(const ForestScene& scene, const CameraPose& pose) {
    const Vec3& p = pose.position;
    if (!scene.world_box.contains_xy(p.x, p.y) || p.z <= 0.0 || p.z >= scene.world_box.height)
        throw ValidationError("camera pose outside world box");
    for (const Cylinder& c : scene.cylinders) {
        double d = std::hypot(p.x - c.x, p.y - c.y);
        if (d <= c.radius) throw ValidationError("camera pose inside a cylinder");
    }
}

}  // namespace

CameraBasis CameraBasis::from_pose(const CameraPose& pose) {
    Mat3 r = rot_z(pose.yaw) * rot_y(-pose.pitch) * rot_x(pose.roll);
    CameraBasis b;
    b.forward = r * Vec3{1, 0, 0};
    b.right = r * Vec3{0, -1, 0};
    b.up = r * Vec3{0, 0, 1};
    return b;
}

ForestScene sample_forest(const PoissonConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    Rng rng(seed);
    ForestScene scene;
    scene.world_box = cfg.world_box;
    scene.seed = seed;

    const WorldBox& box = cfg.world_box;
    std::uint64_t count = rng.poisson(cfg.delta * box.area());
    double start_x = box.x_min;
    double start_y = (box.y_min + box.y_max) / 2.0;

    scene.cylinders.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        Cylinder c;
        c.x = rng.uniform(box.x_min, box.x_max);
        c.y = rng.uniform(box.y_min, box.y_max);
        c.radius = rng.uniform(cfg.r_min, cfg.r_max);
        c.albedo = rng.uniform(0.25, 0.75);
        if (std::hypot(c.x - start_x, c.y - start_y) - c.radius < cfg.min_clearance) continue;
        scene.cylinders.push_back(c);
    }
    return scene;
}

double min_obstacle_distance(const ForestScene& scene, double x, double y,
                             double bearing_lo, double bearing_hi, double max_range) {
    if (!scene.world_box.contains_xy(x, y))
        throw ValidationError("query position outside world box");
    double center = (bearing_lo + bearing_hi) / 2.0;
    double half = (bearing_hi - bearing_lo) / 2.0;
    double best = max_range;
    for (const Cylinder& c : scene.cylinders) {
        double dx = c.x - x;
        double dy = c.y - y;
        double dc = std::hypot(dx, dy);
        if (dc <= c.radius) return 0.0;
        double beta = std::atan2(dy, dx);
        double alpha = std::asin(std::min(1.0, c.radius / dc));
        if (std::abs(wrap_angle(beta - center)) > half + alpha) continue;
        best = std::min(best, dc - c.radius);
    }
    return std::min(best, max_range);
}

RenderResult render_frames(const ForestScene& scene, const CameraTrajectory& traj,
                           const RenderConfig& cfg, unsigned num_threads) {
    traj.validate();
    cfg.validate();
    for (const CameraPose& pose : traj.poses) validate_pose(scene, pose);

    const std::size_t T = traj.poses.size();
    const std::size_t H = cfg.height;
    const std::size_t W = cfg.width;
    const double focal = cfg.focal_pixels();

    RenderResult out;
    out.intensities.resize(T * H * W);
    out.depth.t = T;
    out.depth.h = H;
    out.depth.w = W;
    out.depth.frame_period = traj.frame_period;
    out.depth.depths.resize(T * H * W);

    for (std::size_t ti = 0; ti < T; ++ti) {
        const CameraPose& pose = traj.poses[ti];
        CameraBasis basis = CameraBasis::from_pose(pose);
        float* ibase = out.intensities.data() + ti * H * W;
        float* dbase = out.depth.depths.data() + ti * H * W;
        parallel_for(H, num_threads, [&](std::size_t row_begin, std::size_t row_end) {
            for (std::size_t y = row_begin; y < row_end; ++y) {
                double v = (static_cast<double>(H) / 2.0 - (static_cast<double>(y) + 0.5)) / focal;
                for (std::size_t x = 0; x < W; ++x) {
                    double u = ((static_cast<double>(x) + 0.5) - static_cast<double>(W) / 2.0) / focal;
                    Vec3 dir = (basis.forward + basis.right * u + basis.up * v).normalized();
                    Hit hit = intersect_scene(scene, pose.position, dir);
                    if (hit.valid()) {
                        // planar depth: distance along the optical axis
                        double planar = hit.range * dir.dot(basis.forward);
                        ibase[y * W + x] = static_cast<float>(hit.intensity);
                        dbase[y * W + x] =
                            static_cast<float>(std::min(planar, cfg.max_range));
                    } else {
                        ibase[y * W + x] = static_cast<float>(kSkyIntensity);
                        dbase[y * W + x] = static_cast<float>(cfg.max_range);
                    }
                }
            }
        });
    }
    out.log_frames = log_transform(out.intensities, T, H, W, cfg.epsilon, traj.frame_period,
                                   traj.poses.front().time);
    return out;
}

DistanceMap teacher_distance_map(const ForestScene& scene, const CameraPose& pose,
                                 std::size_t num_bins, double bin_span, double max_range) {
    if (num_bins < 1) throw ValidationError("num_bins must be >= 1");
    if (!(bin_span > 0.0)) throw ValidationError("bin_span must be > 0");
    DistanceMap map;
    map.bin_span = bin_span;
    map.bins.resize(num_bins);
    double total = static_cast<double>(num_bins) * bin_span;
    for (std::size_t i = 0; i < num_bins; ++i) {
        // index 0 is the leftmost bin (largest bearing)
        double hi = pose.yaw + total / 2.0 - static_cast<double>(i) * bin_span;
        double lo = hi - bin_span;
        map.bins[i] = min_obstacle_distance(scene, pose.position.x, pose.position.y, lo, hi,
                                            max_range);
    }
    return map;
}

BandedDistanceMap student_distance_map(const DepthStack& depth, std::size_t frame,
                                       const RenderConfig& cfg, std::size_t num_intervals,
                                       double interval_span) {
    if (frame >= depth.t) throw ValidationError("frame index out of range");
    if (num_intervals < 1) throw ValidationError("num_intervals must be >= 1");
    if (!(interval_span > 0.0)) throw ValidationError("interval_span must be > 0");

    const std::size_t H = depth.h;
    const std::size_t W = depth.w;
    const double focal = cfg.focal_pixels();
    const double total = static_cast<double>(num_intervals) * interval_span;

    // column -> interval index, or -1 when outside the covered sector
    std::vector<int> col_interval(W, -1);
    for (std::size_t x = 0; x < W; ++x) {
        double u = ((static_cast<double>(x) + 0.5) - static_cast<double>(W) / 2.0) / focal;
        double bearing = -std::atan(u);  // columns right of center have negative bearing
        double from_left = total / 2.0 - bearing;
        if (from_left < 0.0 || from_left >= total) continue;
        col_interval[x] = static_cast<int>(from_left / interval_span);
    }

    BandedDistanceMap map;
    map.intervals = num_intervals;
    map.bands.assign(3 * num_intervals, cfg.max_range);

    std::size_t rows_per = H / 3;
    for (std::size_t y = 0; y < H; ++y) {
        std::size_t band = rows_per == 0 ? 2 : std::min<std::size_t>(y / rows_per, 2);
        const float* row = depth.depths.data() + (frame * H + y) * W;
        for (std::size_t x = 0; x < W; ++x) {
            int iv = col_interval[x];
            if (iv < 0) continue;
            double d = std::min(static_cast<double>(row[x]), cfg.max_range);
            double& cell = map.bands[band * num_intervals + static_cast<std::size_t>(iv)];
            cell = std::min(cell, d);
        }
    }
    return map;
}

CameraTrajectory make_trajectory(const TrajectorySpec& spec, double speed, double frame_rate) {
    if (!(speed > 0.0)) throw ValidationError("speed must be > 0");
    if (!(frame_rate > 0.0)) throw ValidationError("frame_rate must be > 0");
    double dt = 1.0 / frame_rate;

    struct Sample {
        Vec3 pos;
        double yaw;
    };
    double length = 0.0;
    std::function<Sample(double)> at;

    if (const auto* s = std::get_if<StraightSpec>(&spec)) {
        if (!(s->length > 0.0)) throw ValidationError("trajectory length must be > 0");
        length = s->length;
        Vec3 start = s->start;
        double heading = s->heading;
        at = [start, heading](double arc) {
            Vec3 dir{std::cos(heading), std::sin(heading), 0.0};
            return Sample{start + dir * arc, wrap_angle(heading)};
        };
    } else if (const auto* a = std::get_if<ArcSpec>(&spec)) {
        if (!(a->length > 0.0)) throw ValidationError("trajectory length must be > 0");
        length = a->length;
        Vec3 start = a->start;
        double h0 = a->heading;
        double k = a->curvature;
        at = [start, h0, k](double arc) {
            double h = h0 + k * arc;
            Vec3 p = start;
            if (std::abs(k) < 1e-12) {
                p = p + Vec3{std::cos(h0), std::sin(h0), 0.0} * arc;
            } else {
                p.x += (std::sin(h) - std::sin(h0)) / k;
                p.y += -(std::cos(h) - std::cos(h0)) / k;
            }
            return Sample{p, wrap_angle(h)};
        };
    } else {
        const auto& wps = std::get<WaypointSpec>(spec).waypoints;
        if (wps.size() < 2) throw ValidationError("need at least two waypoints");
        std::vector<double> cum(wps.size(), 0.0);
        for (std::size_t i = 1; i < wps.size(); ++i) {
            double seg = (wps[i] - wps[i - 1]).norm();
            if (seg <= 0.0) throw ValidationError("duplicate consecutive waypoints");
            cum[i] = cum[i - 1] + seg;
        }
        length = cum.back();
        at = [wps, cum](double arc) {
            std::size_t i = 1;
            while (i + 1 < wps.size() && arc > cum[i]) ++i;
            double seg = cum[i] - cum[i - 1];
            double f = std::clamp((arc - cum[i - 1]) / seg, 0.0, 1.0);
            Vec3 d = wps[i] - wps[i - 1];
            return Sample{wps[i - 1] + d * f, wrap_angle(std::atan2(d.y, d.x))};
        };
    }

    CameraTrajectory traj;
    traj.frame_period = dt;
    std::size_t n = static_cast<std::size_t>(std::floor(length / (speed * dt) + 1e-9));
    traj.poses.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        Sample s = at(static_cast<double>(i) * speed * dt);
        CameraPose pose;
        pose.position = s.pos;
        pose.yaw = s.yaw;
        pose.time = static_cast<double>(i) * dt;
        traj.poses.push_back(pose);
    }
    return traj;
}

double check_flow_bound(const DepthStack& depth, const CameraTrajectory& traj,
                        const RenderConfig& cfg) {
    traj.validate();
    cfg.validate();
    if (depth.t != traj.poses.size())
        throw ValidationError("depth stack and trajectory lengths differ");
    if (depth.h != cfg.height || depth.w != cfg.width)
        throw ValidationError("depth stack and render config shapes differ");

    const std::size_t H = depth.h;
    const std::size_t W = depth.w;
    const double focal = cfg.focal_pixels();
    double max_flow = 0.0;

    for (std::size_t ti = 0; ti + 1 < depth.t; ++ti) {
        CameraBasis a = CameraBasis::from_pose(traj.poses[ti]);
        CameraBasis b = CameraBasis::from_pose(traj.poses[ti + 1]);
        const Vec3 pa = traj.poses[ti].position;
        const Vec3 pb = traj.poses[ti + 1].position;
        for (std::size_t y = 0; y < H; ++y) {
            double v = (static_cast<double>(H) / 2.0 - (static_cast<double>(y) + 0.5)) / focal;
            for (std::size_t x = 0; x < W; ++x) {
                double u = ((static_cast<double>(x) + 0.5) - static_cast<double>(W) / 2.0) / focal;
                // raw has unit forward component, so scaling by the planar
                // depth reconstructs the hit point
                Vec3 raw = a.forward + a.right * u + a.up * v;
                Vec3 point = pa + raw * static_cast<double>(depth.at(ti, y, x));
                Vec3 q = point - pb;
                double f = q.dot(b.forward);
                if (f <= 1e-6) continue;
                double col = static_cast<double>(W) / 2.0 + focal * (q.dot(b.right) / f);
                double row = static_cast<double>(H) / 2.0 - focal * (q.dot(b.up) / f);
                double disp = std::hypot(col - (static_cast<double>(x) + 0.5),
                                         row - (static_cast<double>(y) + 0.5));
                max_flow = std::max(max_flow, disp);
            }
        }
    }
    return max_flow;
}

}  // namespace evsim
