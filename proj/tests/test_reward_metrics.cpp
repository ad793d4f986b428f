#include <cmath>
#include <doctest.h>

#include "evsim/reward_metrics.hpp"
#include "evsim/rng.hpp"

using namespace evsim;

namespace {

QuadState state_with_velocity(const Vec3& v, double yaw = 0.0) {
    QuadState s;
    s.velocity = v;
    s.yaw = yaw;
    s.position = {50, 50, 2};
    return s;
}

RewardBreakdown reward(const QuadState& s, const Vec3& cmd, const ObstacleSet& obs = {},
                       bool crash = false, RewardWeights w = {}) {
    return compute_reward(s, CommandInput{cmd}, ActionCommand{}, ActionCommand{}, obs, crash, w);
}

}  // namespace

TEST_CASE("compute_reward: worked values") {
    RewardBreakdown r = reward(state_with_velocity({1, 0, 0}), {1, 0, 0});
    double tanh2 = std::tanh(2.0);
    CHECK(r.prog == doctest::Approx(tanh2 * tanh2 / 4.0).epsilon(1e-12));
    CHECK(r.act == 0.0);
    CHECK(r.br == 0.0);
    CHECK(r.perc == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.obs_dist == 0.0);  // empty obstacle set
    CHECK(r.crash == 0.0);

    // single obstacle 1 m away exactly along the heading
    ObstacleSet obs = {{1.0, 0.0}};
    RewardBreakdown ro = reward(state_with_velocity({1, 0, 0}, 0.0), {1, 0, 0}, obs);
    CHECK(ro.obs_dist == doctest::Approx(-std::exp(-1.0)).epsilon(1e-14));

    // crash at speed 2
    RewardBreakdown rc = reward(state_with_velocity({2, 0, 0}), {1, 0, 0}, {}, true);
    CHECK(rc.crash == doctest::Approx(-3.0).epsilon(1e-14));

    CHECK_THROWS_AS(reward(state_with_velocity({1, 0, 0}), {0, 0, 0}), ValidationError);
}

TEST_CASE("compute_reward: action terms") {
    ActionCommand a{0.5, {0.1, -0.2, 0.3}};
    RewardBreakdown same = compute_reward(state_with_velocity({1, 0, 0}), CommandInput{{1, 0, 0}},
                                          a, a, {}, false, {});
    CHECK(same.act == 0.0);
    CHECK(same.br == doctest::Approx(-a.body_rates.norm()).epsilon(1e-12));

    ActionCommand b{0.7, {0.1, -0.2, 0.3}};
    RewardBreakdown diff = compute_reward(state_with_velocity({1, 0, 0}), CommandInput{{1, 0, 0}},
                                          b, a, {}, false, {});
    CHECK(diff.act == doctest::Approx(-0.2).epsilon(1e-9));

    ActionCommand bad{1.5, {0, 0, 0}};
    CHECK_THROWS_AS(compute_reward(state_with_velocity({1, 0, 0}), CommandInput{{1, 0, 0}}, bad,
                                   a, {}, false, {}),
                    ValidationError);
}

TEST_CASE("compute_reward: obstacle bearing wrap") {
    // bearing near -pi with yaw near +pi must use the wrapped difference
    QuadState s = state_with_velocity({1, 0, 0}, kPi - 0.05);
    ObstacleSet obs = {{1.0, -kPi + 0.05}};
    RewardBreakdown r = reward(s, {1, 0, 0}, obs);
    CHECK(r.obs_dist == doctest::Approx(-std::exp(-1.0 - 0.01)).epsilon(1e-9));
}

TEST_CASE("property: component bounds under random inputs") {
    Rng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        QuadState s;
        s.velocity = {rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-3, 3)};
        s.yaw = rng.uniform(-kPi, kPi);
        Vec3 cmd{rng.uniform(-8, 8), rng.uniform(-8, 8), 0};
        if (cmd.norm() < 0.1) cmd.x = 1.0;
        ObstacleSet obs;
        int n = static_cast<int>(rng.uniform(0, 4));
        for (int i = 0; i < n; ++i)
            obs.push_back({rng.uniform(0, 40), rng.uniform(-kPi, kPi)});
        RewardBreakdown r = reward(s, cmd, obs, rng.uniform01() < 0.2);

        CHECK(r.perc >= -1.0);
        CHECK(r.perc <= 1.0);
        CHECK(r.obs_dist >= -1.0);
        CHECK(r.obs_dist <= 0.0);
        CHECK(r.act <= 0.0);
        CHECK(r.br <= 0.0);
        double product_part = r.prog + std::abs(s.velocity.z);
        CHECK(product_part > -0.25);
        CHECK(product_part < 0.25);
    }
}

TEST_CASE("property: prog is maximized by command-aligned velocity") {
    Vec3 cmd{5, 0, 0};
    double speed = 4.0;
    double best = -1e9;
    double aligned = reward(state_with_velocity({speed, 0, 0}), cmd).prog;
    for (int i = 0; i < 360; ++i) {
        double a = deg2rad(static_cast<double>(i));
        RewardBreakdown r =
            reward(state_with_velocity({speed * std::cos(a), speed * std::sin(a), 0}), cmd);
        best = std::max(best, r.prog);
    }
    CHECK(aligned == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("property: scaling weights scales the total") {
    QuadState s = state_with_velocity({3, 1, 0.2}, 0.3);
    ObstacleSet obs = {{2.0, 0.1}};
    RewardWeights w;
    w.prog = 0.5;
    w.obs_dist = 2.0;
    RewardBreakdown base = reward(s, {4, 1, 0}, obs, true, w);
    RewardWeights scaled = w;
    const double k = 3.5;
    scaled.prog *= k;
    scaled.act *= k;
    scaled.br *= k;
    scaled.perc *= k;
    scaled.obs_dist *= k;
    scaled.crash *= k;
    RewardBreakdown r = reward(s, {4, 1, 0}, obs, true, scaled);
    CHECK(r.total == doctest::Approx(k * base.total).epsilon(1e-12));
    CHECK(r.prog == base.prog);
    CHECK(r.obs_dist == base.obs_dist);
}

TEST_CASE("visible_obstacles: fov and range gating") {
    ForestScene scene;
    scene.world_box = WorldBox{0, 100, 0, 100, 30};
    scene.cylinders.push_back({60, 50, 0.5, 0.5});   // ahead
    scene.cylinders.push_back({40, 50, 0.5, 0.5});   // behind
    scene.cylinders.push_back({50, 95, 0.5, 0.5});   // ahead-left but beyond 40 m? no: 45 m
    QuadState s = state_with_velocity({1, 0, 0}, 0.0);
    ObstacleSet obs = visible_obstacles(scene, s, 40.0);
    REQUIRE(obs.size() == 1);
    CHECK(obs[0].distance == doctest::Approx(9.5));
    CHECK(obs[0].bearing == doctest::Approx(0.0));
}

TEST_CASE("evaluate_episode: collision-free straight run") {
    ForestScene scene;
    scene.world_box = WorldBox{0, 100, 0, 100, 30};
    // speed 9 at 100 Hz gives a 0.09 m step, so 45 m is a whole number of steps
    CameraTrajectory traj = make_trajectory(StraightSpec{{0, 50, 2}, 0.0, 45.0}, 9.0, 100.0);
    EpisodeStats stats = evaluate_episode(scene, traj, CommandInput{{9, 0, 0}}, EpisodeConfig{});
    CHECK(stats.success);
    CHECK(!stats.crash_step.has_value());
    CHECK(stats.distance_along_command == doctest::Approx(45.0).epsilon(1e-9));
    CHECK(stats.mean_velocity == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("evaluate_episode: crash at the first penetrating step") {
    ForestScene scene;
    scene.world_box = WorldBox{0, 100, 0, 100, 30};
    Cylinder cyl{20.0, 50.0, 0.5, 0.5};
    scene.cylinders.push_back(cyl);
    EpisodeConfig cfg;
    CameraTrajectory traj = make_trajectory(StraightSpec{{0, 50, 2}, 0.0, 45.0}, 9.0, 100.0);

    // first pose whose distance to the surface is below the quad radius
    std::size_t expected = 0;
    for (std::size_t i = 0; i < traj.poses.size(); ++i) {
        const Vec3& p = traj.poses[i].position;
        if (std::hypot(p.x - cyl.x, p.y - cyl.y) - cyl.radius < cfg.quad_radius) {
            expected = i;
            break;
        }
    }
    REQUIRE(expected > 0);

    EpisodeStats stats = evaluate_episode(scene, traj, CommandInput{{9, 0, 0}}, cfg);
    CHECK(!stats.success);
    REQUIRE(stats.crash_step.has_value());
    CHECK(*stats.crash_step == expected);
    CHECK(stats.distance_along_command ==
          doctest::Approx(traj.poses[expected].position.x).epsilon(1e-9));
}

TEST_CASE("evaluate_episode: leaving the world box fails") {
    ForestScene scene;
    scene.world_box = WorldBox{0, 100, 0, 100, 30};
    CameraTrajectory traj = make_trajectory(StraightSpec{{80, 50, 2}, 0.0, 45.0}, 8.0, 50.0);
    EpisodeStats stats = evaluate_episode(scene, traj, CommandInput{{8, 0, 0}}, EpisodeConfig{});
    CHECK(!stats.success);
    CHECK(stats.crash_step.has_value());
}

TEST_CASE("property: removing a cylinder never turns success into failure") {
    Rng rng(77);
    for (int trial = 0; trial < 25; ++trial) {
        PoissonConfig pcfg;
        pcfg.delta = 0.002;
        ForestScene scene = sample_forest(pcfg, 1000 + static_cast<std::uint64_t>(trial));
        CameraTrajectory traj =
            make_trajectory(StraightSpec{{0, 50, 2}, rng.uniform(-0.2, 0.2), 60.0}, 8.0, 20.0);
        CommandInput cmd{{8, 0, 0}};
        EpisodeStats full = evaluate_episode(scene, traj, cmd, EpisodeConfig{});
        if (!full.success || scene.cylinders.empty()) continue;
        ForestScene reduced = scene;
        reduced.cylinders.erase(reduced.cylinders.begin() +
                                static_cast<std::ptrdiff_t>(rng.uniform(0.0, 0.999) *
                                                            static_cast<double>(
                                                                reduced.cylinders.size())));
        EpisodeStats sub = evaluate_episode(reduced, traj, cmd, EpisodeConfig{});
        CHECK(sub.success);
    }
}
