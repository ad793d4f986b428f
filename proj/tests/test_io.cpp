#include <cstdio>
#include <doctest.h>
#include <filesystem>
#include <fstream>

#include "evsim/io.hpp"
#include "evsim/rng.hpp"

using namespace evsim;

namespace {

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

struct TempFile {
    std::string path;
    explicit TempFile(const char* name) : path(temp_path(name)) {}
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("EVF1 round trip for all dtypes") {
    TempFile f("evsim_test.evf");
    Rng rng(1);

    FrameContainer log;
    log.dtype = 1;
    log.t = 3;
    log.h = 4;
    log.w = 5;
    log.frame_period = 0.002;
    for (std::size_t i = 0; i < 60; ++i)
        log.f32_data.push_back(static_cast<float>(rng.uniform(-7, 0)));
    write_evf(f.path, log);
    FrameContainer back = read_evf(f.path);
    CHECK(back.dtype == 1);
    CHECK(back.t == 3);
    CHECK(back.h == 4);
    CHECK(back.w == 5);
    CHECK(back.frame_period == 0.002);
    CHECK(back.f32_data == log.f32_data);

    FrameContainer raw;
    raw.dtype = 0;
    raw.t = 2;
    raw.h = 2;
    raw.w = 2;
    raw.frame_period = 0.01;
    raw.u8_data = {0, 64, 128, 255, 10, 20, 30, 40};
    write_evf(f.path, raw);
    FrameContainer raw_back = read_evf(f.path);
    CHECK(raw_back.u8_data == raw.u8_data);

    // dtype 0 converts through the log transform
    LogFrameStack stack = to_log_stack(raw_back, 1e-3);
    CHECK(stack.frames[0] == doctest::Approx(std::log(1e-3)));
    CHECK(stack.frames[3] == doctest::Approx(std::log(1.001)));
}

TEST_CASE("EVF1 depth dtype") {
    TempFile f("evsim_depth.evf");
    DepthStack depth;
    depth.t = 1;
    depth.h = 2;
    depth.w = 3;
    depth.frame_period = 0.01;
    depth.depths = {1.0f, 2.0f, 3.0f, 4.0f, 5.0f, 50.0f};
    write_evf(f.path, frame_container_from_depth(depth));
    FrameContainer c = read_evf(f.path);
    CHECK(c.dtype == 2);
    DepthStack back = to_depth_stack(c);
    CHECK(back.depths == depth.depths);
    CHECK_THROWS_AS(to_log_stack(c, 1e-3), ValidationError);
}

TEST_CASE("EVT1 and EVS1 round trips") {
    TempFile ft("evsim_test.evt");
    EventTensor t = EventTensor::zeros(3, 2, 2, 7);
    t.at(0, 1, 0, 1) = 5;
    t.at(1, 2, 1, 0) = 9;
    write_evt(ft.path, t);
    EventTensor tb = read_evt(ft.path);
    CHECK(tb.counts == t.counts);
    CHECK(tb.bin_boundaries == t.bin_boundaries);

    TempFile fs("evsim_test.evs");
    SparseEventStream s;
    s.events.push_back({1, 3, 2, 1});
    s.events.push_back({4, 0, 0, -1});
    write_evs(fs.path, s);
    SparseEventStream sb = read_evs(fs.path);
    REQUIRE(sb.events.size() == 2);
    CHECK(sb.events[0].step == 1);
    CHECK(sb.events[0].x == 3);
    CHECK(sb.events[1].polarity == -1);
}

TEST_CASE("bad magic and truncation are rejected") {
    TempFile f("evsim_bad.bin");
    {
        std::ofstream os(f.path, std::ios::binary);
        os << "NOPE and some junk";
    }
    CHECK_THROWS_AS(read_evf(f.path), ValidationError);
    CHECK_THROWS_AS(read_evt(f.path), ValidationError);
    CHECK_THROWS_AS(read_evs(f.path), ValidationError);
    CHECK_THROWS_AS(read_evf(temp_path("evsim_missing_file.evf")), ValidationError);
}

TEST_CASE("scene JSON round trip") {
    TempFile f("evsim_scene.json");
    ForestScene scene;
    scene.world_box = WorldBox{0, 80, 0, 90, 25};
    scene.seed = 1234;
    scene.background_albedo = 0.35;
    scene.cylinders.push_back({10.5, 20.25, 0.4, 0.6});
    scene.cylinders.push_back({30.0, 40.0, 0.25, 0.5});
    write_scene_json(f.path, scene);
    ForestScene back = read_scene_json(f.path);
    CHECK(back.seed == 1234);
    CHECK(back.world_box.x_max == 80);
    CHECK(back.background_albedo == 0.35);
    REQUIRE(back.cylinders.size() == 2);
    CHECK(back.cylinders[0].x == 10.5);
    CHECK(back.cylinders[1].radius == 0.25);

    {
        std::ofstream os(f.path);
        os << "{\"seed\": 1}";
    }
    CHECK_THROWS_AS(read_scene_json(f.path), ValidationError);
}

TEST_CASE("trajectory CSV round trip") {
    TempFile f("evsim_traj.csv");
    CameraTrajectory traj = make_trajectory(StraightSpec{{0, 50, 2}, 0.25, 5.0}, 5.0, 50.0);
    write_trajectory_csv(f.path, traj);
    CameraTrajectory back = read_trajectory_csv(f.path);
    REQUIRE(back.poses.size() == traj.poses.size());
    CHECK(back.frame_period == doctest::Approx(traj.frame_period).epsilon(1e-9));
    for (std::size_t i = 0; i < traj.poses.size(); ++i) {
        CHECK(back.poses[i].position.x ==
              doctest::Approx(traj.poses[i].position.x).epsilon(1e-8));
        CHECK(back.poses[i].yaw == doctest::Approx(traj.poses[i].yaw).epsilon(1e-8));
    }

    {
        std::ofstream os(f.path);
        os << "wrong,header\n";
    }
    CHECK_THROWS_AS(read_trajectory_csv(f.path), ValidationError);
}

TEST_CASE("weights JSON") {
    TempFile f("evsim_weights.json");
    {
        std::ofstream os(f.path);
        os << "{\"prog\": 0.5, \"obs_dist\": 2.0}";
    }
    RewardWeights w = read_weights_json(f.path);
    CHECK(w.prog == 0.5);
    CHECK(w.obs_dist == 2.0);
    CHECK(w.act == 1.0);

    {
        std::ofstream os(f.path);
        os << "{\"typo\": 0.5}";
    }
    CHECK_THROWS_AS(read_weights_json(f.path), ValidationError);
}

TEST_CASE("format_g9 stability") {
    CHECK(format_g9(0.0) == "0");
    CHECK(format_g9(1.0 / 3.0) == "0.333333333");
    CHECK(format_g9(45.0) == "45");
}
