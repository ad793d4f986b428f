#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "evsim/bench_harness.hpp"
#include "evsim/event_core.hpp"
#include "evsim/io.hpp"
#include "evsim/reward_metrics.hpp"
#include "evsim/scene_forest.hpp"

namespace {

using namespace evsim;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitMismatch = 2;

// Flat JSON config files; command-line flags override file values.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}";
    }
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        nlohmann::json j;
        input >> j;
        if (!j.is_object()) throw CLI::FileError("config file must hold a JSON object");
        std::vector<CLI::ConfigItem> out;
        for (const auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            item.name = key;
            if (value.is_array()) {
                for (const auto& e : value)
                    item.inputs.push_back(e.is_string() ? e.get<std::string>() : e.dump());
            } else if (value.is_string()) {
                item.inputs.push_back(value.get<std::string>());
            } else {
                item.inputs.push_back(value.dump());
            }
            out.push_back(item);
        }
        return out;
    }
};

void add_config_option(CLI::App* sub) {
    sub->set_config("--config", "", "JSON config file; flags override file values");
    sub->config_formatter(std::make_shared<JsonConfig>());
    sub->allow_config_extras(false);
}

std::vector<double> parse_numbers(const std::string& s, std::size_t expected,
                                  const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ValidationError("cannot parse " + what + ": '" + s + "'");
        }
    }
    if (expected != 0 && out.size() != expected)
        throw ValidationError(what + " must have " + std::to_string(expected) +
                              " comma-separated values: '" + s + "'");
    return out;
}

void ensure_parent_dir(const std::string& path) {
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

int cmd_gen_scene(const std::string& out, double delta, std::uint64_t seed, double world_x,
                  double world_y, double world_height, double r_min, double r_max,
                  double clearance) {
    PoissonConfig cfg;
    cfg.delta = delta;
    cfg.r_min = r_min;
    cfg.r_max = r_max;
    cfg.world_box = WorldBox{0.0, world_x, 0.0, world_y, world_height};
    cfg.min_clearance = clearance;
    ForestScene scene = sample_forest(cfg, seed);
    ensure_parent_dir(out);
    write_scene_json(out, scene);
    std::cout << "scene: " << scene.cylinders.size() << " cylinders -> " << out << "\n";
    return kExitOk;
}

int cmd_gen_traj(const std::string& out, const std::string& type, const std::string& start_s,
                 double heading_deg, double length, double curvature,
                 const std::string& waypoints_s, double speed, double frame_rate) {
    TrajectorySpec spec;
    auto start_v = parse_numbers(start_s, 3, "--start");
    Vec3 start{start_v[0], start_v[1], start_v[2]};
    if (type == "straight") {
        spec = StraightSpec{start, deg2rad(heading_deg), length};
    } else if (type == "arc") {
        spec = ArcSpec{start, deg2rad(heading_deg), curvature, length};
    } else if (type == "waypoints") {
        WaypointSpec w;
        std::stringstream ss(waypoints_s);
        std::string tok;
        while (std::getline(ss, tok, ';')) {
            auto p = parse_numbers(tok, 3, "--waypoints entry");
            w.waypoints.push_back({p[0], p[1], p[2]});
        }
        spec = w;
    } else {
        throw ValidationError("--type must be straight, arc, or waypoints");
    }
    CameraTrajectory traj = make_trajectory(spec, speed, frame_rate);
    ensure_parent_dir(out);
    write_trajectory_csv(out, traj);
    std::cout << "trajectory: " << traj.poses.size() << " poses -> " << out << "\n";
    return kExitOk;
}

int cmd_render(const std::string& scene_path, const std::string& traj_path,
               const std::string& out_frames, const std::string& out_depth, std::size_t width,
               std::size_t height, double fov_deg, double max_range, double epsilon,
               unsigned threads) {
    ForestScene scene = read_scene_json(scene_path);
    CameraTrajectory traj = read_trajectory_csv(traj_path);
    RenderConfig cfg;
    cfg.width = width;
    cfg.height = height;
    cfg.horizontal_fov = deg2rad(fov_deg);
    cfg.max_range = max_range;
    cfg.epsilon = epsilon;
    RenderResult res = render_frames(scene, traj, cfg, threads);
    ensure_parent_dir(out_frames);
    write_evf(out_frames, frame_container_from_log(res.log_frames));
    if (!out_depth.empty()) {
        ensure_parent_dir(out_depth);
        write_evf(out_depth, frame_container_from_depth(res.depth));
    }
    std::cout << "rendered " << res.log_frames.t << " frames at " << width << "x" << height
              << " -> " << out_frames << "\n";
    return kExitOk;
}

int cmd_events(const std::string& in, const std::string& out, double contrast, double offset,
               int initial_direction, std::uint32_t bins, double epsilon, unsigned threads) {
    LogFrameStack stack = to_log_stack(read_evf(in), epsilon);
    ContrastConfig ccfg{contrast, offset, initial_direction};
    EventTensor tensor = vectorized_event_tensor(stack, ccfg, BinningConfig{bins}, threads);
    ensure_parent_dir(out);
    write_evt(out, tensor);
    std::cout << "events: " << tensor.total() << " -> " << out << "\n";
    return kExitOk;
}

int cmd_oracle(const std::string& in, const std::string& out_stream,
               const std::string& out_tensor, double contrast, double offset,
               int initial_direction, std::uint32_t bins, double epsilon,
               std::uint32_t downsample, std::size_t down_width, std::size_t down_height) {
    LogFrameStack stack = to_log_stack(read_evf(in), epsilon);
    ContrastConfig ccfg{contrast, offset, initial_direction};
    SparseEventStream stream = oracle_event_stream(stack, ccfg);
    std::size_t out_w = stack.w;
    std::size_t out_h = stack.h;
    if (downsample > 1) {
        out_w = down_width != 0 ? down_width : (stack.w + downsample - 1) / downsample;
        out_h = down_height != 0 ? down_height : (stack.h + downsample - 1) / downsample;
        stream = downsample_stream(stream, downsample, out_w, out_h);
    }
    if (!out_stream.empty()) {
        ensure_parent_dir(out_stream);
        write_evs(out_stream, stream);
    }
    if (!out_tensor.empty()) {
        EventTensor tensor = accumulate_tensor(stream, stack.t, out_h, out_w,
                                               BinningConfig{bins});
        ensure_parent_dir(out_tensor);
        write_evt(out_tensor, tensor);
    }
    std::cout << "oracle: " << stream.events.size() << " events\n";
    return kExitOk;
}

int cmd_compare(const std::string& lhs_path, const std::string& rhs_path) {
    EventTensor lhs = read_evt(lhs_path);
    EventTensor rhs = read_evt(rhs_path);
    DiffReport report = diff_tensors(lhs, rhs);
    std::cout << "total_abs_difference=" << report.total_abs_difference
              << " mismatched_cells=" << report.num_mismatched_cells << "\n";
    if (!report.equal()) {
        const auto& m = *report.first_mismatch;
        std::cout << "first_mismatch: pol=" << m.polarity_index << " bin=" << m.bin
                  << " y=" << m.y << " x=" << m.x << " lhs=" << m.lhs << " rhs=" << m.rhs
                  << "\n";
        return kExitMismatch;
    }
    return kExitOk;
}

int cmd_distmap(const std::string& scene_path, const std::string& pose_s,
                const std::string& depth_path, std::size_t frame, std::size_t bins,
                double span_deg, double max_range, double fov_deg, const std::string& out) {
    ensure_parent_dir(out);
    std::ofstream os(out);
    if (!os) throw ValidationError("cannot open for writing: " + out);

    if (!scene_path.empty()) {
        if (pose_s.empty()) throw ValidationError("--pose is required with --scene");
        auto p = parse_numbers(pose_s, 6, "--pose");
        CameraPose pose;
        pose.position = {p[0], p[1], p[2]};
        pose.yaw = wrap_angle(deg2rad(p[3]));
        pose.pitch = deg2rad(p[4]);
        pose.roll = deg2rad(p[5]);
        ForestScene scene = read_scene_json(scene_path);
        DistanceMap map =
            teacher_distance_map(scene, pose, bins, deg2rad(span_deg), max_range);
        for (std::size_t i = 0; i < map.bins.size(); ++i)
            os << (i ? "," : "") << format_g9(map.bins[i]);
        os << "\n";
    } else if (!depth_path.empty()) {
        DepthStack depth = to_depth_stack(read_evf(depth_path));
        RenderConfig cfg;
        cfg.width = depth.w;
        cfg.height = depth.h;
        cfg.horizontal_fov = deg2rad(fov_deg);
        cfg.max_range = max_range;
        BandedDistanceMap map =
            student_distance_map(depth, frame, cfg, bins, deg2rad(span_deg));
        for (std::size_t band = 0; band < 3; ++band) {
            for (std::size_t i = 0; i < map.intervals; ++i)
                os << (i ? "," : "") << format_g9(map.at(band, i));
            os << "\n";
        }
    } else {
        throw ValidationError("either --scene or --depth is required");
    }
    if (!os) throw ValidationError("write failed: " + out);
    return kExitOk;
}

int cmd_reward_eval(const std::string& scene_path, const std::string& traj_path,
                    const std::string& cmd_s, const std::string& weights_path,
                    double quad_radius, double threshold, double max_range,
                    std::uint64_t episode_id, double poisson_delta,
                    const std::string& out_rewards, const std::string& out_episode) {
    ForestScene scene = read_scene_json(scene_path);
    CameraTrajectory traj = read_trajectory_csv(traj_path);
    auto c = parse_numbers(cmd_s, 3, "--cmd");
    CommandInput cmd{Vec3{c[0], c[1], c[2]}};
    RewardWeights weights;
    if (!weights_path.empty()) weights = read_weights_json(weights_path);

    EpisodeConfig ecfg;
    ecfg.quad_radius = quad_radius;
    ecfg.success_threshold = threshold;
    ecfg.ceiling_z = scene.world_box.height;
    EpisodeStats stats = evaluate_episode(scene, traj, cmd, ecfg);

    ensure_parent_dir(out_rewards);
    std::ofstream ros(out_rewards);
    if (!ros) throw ValidationError("cannot open for writing: " + out_rewards);
    ros << "step,time,r_prog,r_act,r_br,r_perc,r_obs_dist,r_crash,r_total\n";
    std::size_t last = stats.crash_step ? *stats.crash_step : traj.poses.size() - 1;
    ActionCommand zero_action;
    for (std::size_t i = 0; i <= last; ++i) {
        const CameraPose& pose = traj.poses[i];
        QuadState state;
        state.position = pose.position;
        state.yaw = pose.yaw;
        // velocity from the forward pose difference; the final step reuses
        // the previous difference
        std::size_t a = std::min(i, traj.poses.size() - 2);
        state.velocity = (traj.poses[a + 1].position - traj.poses[a].position) *
                         (1.0 / traj.frame_period);
        bool crashed = stats.crash_step && i == *stats.crash_step;
        ObstacleSet obstacles = visible_obstacles(scene, state, max_range);
        RewardBreakdown r =
            compute_reward(state, cmd, zero_action, zero_action, obstacles, crashed, weights);
        ros << i << ',' << format_g9(pose.time) << ',' << format_g9(r.prog) << ','
            << format_g9(r.act) << ',' << format_g9(r.br) << ',' << format_g9(r.perc) << ','
            << format_g9(r.obs_dist) << ',' << format_g9(r.crash) << ','
            << format_g9(r.total) << '\n';
    }
    if (!ros) throw ValidationError("write failed: " + out_rewards);

    ensure_parent_dir(out_episode);
    std::ofstream eos(out_episode);
    if (!eos) throw ValidationError("cannot open for writing: " + out_episode);
    eos << "episode_id,seed,poisson_delta,success,distance_m,mean_velocity_mps,crash_step\n";
    eos << episode_id << ',' << scene.seed << ',' << format_g9(poisson_delta) << ','
        << (stats.success ? 1 : 0) << ',' << format_g9(stats.distance_along_command) << ','
        << format_g9(stats.mean_velocity) << ','
        << (stats.crash_step ? std::to_string(*stats.crash_step) : std::string()) << '\n';
    if (!eos) throw ValidationError("write failed: " + out_episode);

    std::cout << "episode: success=" << (stats.success ? 1 : 0)
              << " distance=" << format_g9(stats.distance_along_command) << "\n";
    return kExitOk;
}

int cmd_bench(const std::string& env_counts_s, std::size_t reps, std::size_t width,
              std::size_t height, std::size_t frames, double contrast, std::uint32_t bins,
              std::uint64_t seed, bool no_timing, const std::string& out,
              const std::string& json_sidecar) {
    BenchConfig cfg;
    cfg.env_counts.clear();
    for (double v : parse_numbers(env_counts_s, 0, "--env-counts"))
        cfg.env_counts.push_back(static_cast<std::size_t>(v));
    cfg.repetitions = reps;
    cfg.width = width;
    cfg.height = height;
    cfg.frames = frames;
    cfg.contrast = contrast;
    cfg.num_bins = bins;
    cfg.seed = seed;
    cfg.measure_time = !no_timing;

    BenchReport report = run_benchmark(cfg);
    ensure_parent_dir(out);
    write_report(report, out);
    if (!json_sidecar.empty()) {
        nlohmann::json j;
        j["env_counts"] = cfg.env_counts;
        j["height"] = cfg.height;
        j["width"] = cfg.width;
        j["frames"] = cfg.frames;
        j["contrast"] = cfg.contrast;
        j["num_bins"] = cfg.num_bins;
        j["repetitions"] = cfg.repetitions;
        j["seed"] = cfg.seed;
        j["measure_time"] = cfg.measure_time;
        ensure_parent_dir(json_sidecar);
        std::ofstream js(json_sidecar);
        js << j.dump(2) << "\n";
        if (!js) throw ValidationError("write failed: " + json_sidecar);
    }
    std::cout << "bench: " << report.rows.size() << " rows -> " << out << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"event-camera simulation toolkit"};
    app.require_subcommand(1);

    // gen-scene
    auto* gen_scene = app.add_subcommand("gen-scene", "sample a Poisson forest scene");
    std::string gs_out = "scene.json";
    double gs_delta = 0.04, gs_wx = 100.0, gs_wy = 100.0, gs_wh = 30.0;
    double gs_rmin = 0.2, gs_rmax = 0.5, gs_clearance = 2.0;
    std::uint64_t gs_seed = 0;
    gen_scene->add_option("--out", gs_out, "output scene JSON");
    gen_scene->add_option("--delta", gs_delta, "Poisson intensity, trees per m^2");
    gen_scene->add_option("--seed", gs_seed, "RNG seed");
    gen_scene->add_option("--world-x", gs_wx, "world extent in x, m");
    gen_scene->add_option("--world-y", gs_wy, "world extent in y, m");
    gen_scene->add_option("--world-height", gs_wh, "world height, m");
    gen_scene->add_option("--rmin", gs_rmin, "minimum cylinder radius, m");
    gen_scene->add_option("--rmax", gs_rmax, "maximum cylinder radius, m");
    gen_scene->add_option("--clearance", gs_clearance, "start clearance radius, m");
    add_config_option(gen_scene);

    // gen-traj
    auto* gen_traj = app.add_subcommand("gen-traj", "generate a camera trajectory");
    std::string gt_out = "traj.csv", gt_type = "straight", gt_start = "0,50,2", gt_wps;
    double gt_heading = 0.0, gt_length = 10.0, gt_curvature = 0.0;
    double gt_speed = 5.0, gt_rate = 100.0;
    gen_traj->add_option("--out", gt_out, "output trajectory CSV");
    gen_traj->add_option("--type", gt_type, "straight, arc, or waypoints");
    gen_traj->add_option("--start", gt_start, "start position x,y,z");
    gen_traj->add_option("--heading-deg", gt_heading, "initial heading, degrees");
    gen_traj->add_option("--length", gt_length, "path length, m");
    gen_traj->add_option("--curvature", gt_curvature, "arc curvature, 1/m");
    gen_traj->add_option("--waypoints", gt_wps, "semicolon-separated x,y,z triples");
    gen_traj->add_option("--speed", gt_speed, "speed, m/s");
    gen_traj->add_option("--frame-rate", gt_rate, "frames per second");
    add_config_option(gen_traj);

    // render
    auto* render = app.add_subcommand("render", "render log-intensity and depth stacks");
    std::string r_scene, r_traj, r_out_frames = "frames.evf", r_out_depth;
    std::size_t r_width = 320, r_height = 240;
    double r_fov = 90.0, r_max_range = 50.0, r_eps = 1e-3;
    unsigned r_threads = 1;
    render->add_option("--scene", r_scene, "scene JSON")->required();
    render->add_option("--traj", r_traj, "trajectory CSV")->required();
    render->add_option("--out-frames", r_out_frames, "output EVF1 log frames");
    render->add_option("--out-depth", r_out_depth, "output EVF1 depth stack");
    render->add_option("--width", r_width, "image width, px");
    render->add_option("--height", r_height, "image height, px");
    render->add_option("--fov-deg", r_fov, "horizontal field of view, degrees");
    render->add_option("--max-range", r_max_range, "depth clamp, m");
    render->add_option("--epsilon", r_eps, "log-transform epsilon");
    render->add_option("--threads", r_threads, "worker threads");
    add_config_option(render);

    // events
    auto* events = app.add_subcommand("events", "vectorized event tensor from EVF1 frames");
    std::string e_in, e_out = "events.evt";
    double e_contrast = 0.2, e_offset = 0.0, e_eps = 1e-3;
    int e_dir = 1;
    std::uint32_t e_bins = 5;
    unsigned e_threads = 1;
    events->add_option("--in", e_in, "input EVF1 frames")->required();
    events->add_option("--out", e_out, "output EVT1 tensor");
    events->add_option("--contrast", e_contrast, "contrast threshold C");
    events->add_option("--offset", e_offset, "reference offset");
    events->add_option("--initial-direction", e_dir, "initial crossing sign, +1 or -1");
    events->add_option("--bins", e_bins, "temporal bins");
    events->add_option("--epsilon", e_eps, "log-transform epsilon for u8 input");
    events->add_option("--threads", e_threads, "worker threads");
    add_config_option(events);

    // oracle
    auto* oracle = app.add_subcommand("oracle", "sequential reference event generation");
    std::string o_in, o_out_stream, o_out_tensor;
    double o_contrast = 0.2, o_offset = 0.0, o_eps = 1e-3;
    int o_dir = 1;
    std::uint32_t o_bins = 5, o_down = 1;
    std::size_t o_down_w = 0, o_down_h = 0;
    oracle->add_option("--in", o_in, "input EVF1 frames")->required();
    oracle->add_option("--out-stream", o_out_stream, "output EVS1 stream");
    oracle->add_option("--out-tensor", o_out_tensor, "output EVT1 tensor");
    oracle->add_option("--contrast", o_contrast, "contrast threshold C");
    oracle->add_option("--offset", o_offset, "reference offset");
    oracle->add_option("--initial-direction", o_dir, "initial crossing sign, +1 or -1");
    oracle->add_option("--bins", o_bins, "temporal bins");
    oracle->add_option("--epsilon", o_eps, "log-transform epsilon for u8 input");
    oracle->add_option("--downsample", o_down, "integer coordinate divisor");
    oracle->add_option("--down-width", o_down_w, "downsampled width (0 = ceil divide)");
    oracle->add_option("--down-height", o_down_h, "downsampled height (0 = ceil divide)");
    add_config_option(oracle);

    // compare
    auto* compare = app.add_subcommand("compare", "diff two EVT1 tensors");
    std::string c_lhs, c_rhs;
    compare->add_option("lhs", c_lhs, "first EVT1 file")->required();
    compare->add_option("rhs", c_rhs, "second EVT1 file")->required();

    // distmap
    auto* distmap = app.add_subcommand("distmap", "teacher or student distance map");
    std::string d_scene, d_pose, d_depth, d_out = "distmap.csv";
    std::size_t d_frame = 0, d_bins = 10;
    double d_span = 11.25, d_max_range = 50.0, d_fov = 90.0;
    distmap->add_option("--scene", d_scene, "scene JSON (teacher map)");
    distmap->add_option("--pose", d_pose, "pose x,y,z,yaw_deg,pitch_deg,roll_deg");
    distmap->add_option("--depth", d_depth, "EVF1 depth stack (student map)");
    distmap->add_option("--frame", d_frame, "depth frame index");
    distmap->add_option("--bins", d_bins, "angular bins / intervals");
    distmap->add_option("--span-deg", d_span, "bin span, degrees");
    distmap->add_option("--max-range", d_max_range, "distance clamp, m");
    distmap->add_option("--fov-deg", d_fov, "horizontal fov of the depth camera, degrees");
    distmap->add_option("--out", d_out, "output CSV");
    add_config_option(distmap);

    // reward-eval
    auto* reward = app.add_subcommand("reward-eval", "per-step rewards and episode stats");
    std::string w_scene, w_traj, w_cmd = "8,0,0", w_weights;
    std::string w_out_rewards = "rewards.csv", w_out_episode = "episode.csv";
    double w_quad_radius = 0.15, w_threshold = 40.0, w_max_range = 50.0, w_delta = 0.0;
    std::uint64_t w_episode_id = 0;
    reward->add_option("--scene", w_scene, "scene JSON")->required();
    reward->add_option("--traj", w_traj, "trajectory CSV")->required();
    reward->add_option("--cmd", w_cmd, "commanded velocity vx,vy,vz");
    reward->add_option("--weights", w_weights, "JSON file of lambda weights");
    reward->add_option("--quad-radius", w_quad_radius, "crash envelope radius, m");
    reward->add_option("--threshold", w_threshold, "success distance threshold, m");
    reward->add_option("--max-range", w_max_range, "obstacle perception range, m");
    reward->add_option("--episode-id", w_episode_id, "episode id for the report row");
    reward->add_option("--delta", w_delta, "poisson delta recorded in the report row");
    reward->add_option("--out-rewards", w_out_rewards, "per-step reward CSV");
    reward->add_option("--out-episode", w_out_episode, "episode stats CSV");
    add_config_option(reward);

    // bench
    auto* bench = app.add_subcommand("bench", "runtime and logical-memory benchmark");
    std::string b_env_counts = "1,5,10,15,20,25", b_out = "bench.csv", b_sidecar;
    std::size_t b_reps = 3, b_width = 320, b_height = 240, b_frames = 240;
    double b_contrast = 0.2;
    std::uint32_t b_bins = 5;
    std::uint64_t b_seed = 1;
    bool b_no_timing = false;
    bench->add_option("--env-counts", b_env_counts, "comma-separated environment counts");
    bench->add_option("--reps", b_reps, "timed repetitions (>= 3)");
    bench->add_option("--width", b_width, "frame width, px");
    bench->add_option("--height", b_height, "frame height, px");
    bench->add_option("--frames", b_frames, "frames per environment");
    bench->add_option("--contrast", b_contrast, "contrast threshold C");
    bench->add_option("--bins", b_bins, "temporal bins");
    bench->add_option("--seed", b_seed, "RNG seed");
    bench->add_flag("--no-timing", b_no_timing,
                    "skip wall-clock timing for byte-reproducible output");
    bench->add_option("--out", b_out, "output report CSV");
    bench->add_option("--json-sidecar", b_sidecar, "optional config echo JSON");
    add_config_option(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (gen_scene->parsed())
            return cmd_gen_scene(gs_out, gs_delta, gs_seed, gs_wx, gs_wy, gs_wh, gs_rmin,
                                 gs_rmax, gs_clearance);
        if (gen_traj->parsed())
            return cmd_gen_traj(gt_out, gt_type, gt_start, gt_heading, gt_length,
                                gt_curvature, gt_wps, gt_speed, gt_rate);
        if (render->parsed())
            return cmd_render(r_scene, r_traj, r_out_frames, r_out_depth, r_width, r_height,
                              r_fov, r_max_range, r_eps, r_threads);
        if (events->parsed())
            return cmd_events(e_in, e_out, e_contrast, e_offset, e_dir, e_bins, e_eps,
                              e_threads);
        if (oracle->parsed())
            return cmd_oracle(o_in, o_out_stream, o_out_tensor, o_contrast, o_offset, o_dir,
                              o_bins, o_eps, o_down, o_down_w, o_down_h);
        if (compare->parsed()) return cmd_compare(c_lhs, c_rhs);
        if (distmap->parsed())
            return cmd_distmap(d_scene, d_pose, d_depth, d_frame, d_bins, d_span,
                               d_max_range, d_fov, d_out);
        if (reward->parsed())
            return cmd_reward_eval(w_scene, w_traj, w_cmd, w_weights, w_quad_radius,
                                   w_threshold, w_max_range, w_episode_id, w_delta,
                                   w_out_rewards, w_out_episode);
        if (bench->parsed())
            return cmd_bench(b_env_counts, b_reps, b_width, b_height, b_frames, b_contrast,
                             b_bins, b_seed, b_no_timing, b_out, b_sidecar);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
