#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evsim/event_core.hpp"
#include "evsim/reward_metrics.hpp"
#include "evsim/scene_forest.hpp"

namespace evsim {

// "EVF1" frame container. dtype 0 = u8 linear intensity, 1 = f32 log
// intensity, 2 = f32 depth in meters.
struct FrameContainer {
    std::uint8_t dtype = 1;
    std::size_t t = 0, h = 0, w = 0;
    double frame_period = 0.0;
    std::vector<std::uint8_t> u8_data;   // dtype 0
    std::vector<float> f32_data;         // dtype 1 or 2
};

void write_evf(const std::string& path, const FrameContainer& c);
FrameContainer read_evf(const std::string& path);

FrameContainer frame_container_from_log(const LogFrameStack& stack);
FrameContainer frame_container_from_depth(const DepthStack& depth);
FrameContainer frame_container_from_intensity_u8(const std::vector<float>& intensities,
                                                 std::size_t t, std::size_t h, std::size_t w,
                                                 double frame_period);

// dtype 0 is log-transformed with epsilon; dtype 1 passes through.
LogFrameStack to_log_stack(const FrameContainer& c, double epsilon);
DepthStack to_depth_stack(const FrameContainer& c);

// "EVT1" event tensor container.
void write_evt(const std::string& path, const EventTensor& t);
EventTensor read_evt(const std::string& path);

// "EVS1" sparse stream container.
void write_evs(const std::string& path, const SparseEventStream& s);
SparseEventStream read_evs(const std::string& path);

void write_scene_json(const std::string& path, const ForestScene& scene);
ForestScene read_scene_json(const std::string& path);

void write_trajectory_csv(const std::string& path, const CameraTrajectory& traj);
CameraTrajectory read_trajectory_csv(const std::string& path);

RewardWeights read_weights_json(const std::string& path);

// Fixed 9-significant-digit formatting used by every CSV emitter.
std::string format_g9(double v);

}  // namespace evsim
