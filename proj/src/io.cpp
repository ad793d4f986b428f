#include "evsim/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

static_assert(std::endian::native == std::endian::little,
              "container formats are little-endian; big-endian hosts unsupported");

namespace evsim {

namespace {

void write_bytes(std::ostream& os, const void* p, std::size_t n) {
    os.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void write_pod(std::ostream& os, T v) {
    write_bytes(os, &v, sizeof(T));
}

void read_bytes(std::istream& is, void* p, std::size_t n, const std::string& path) {
    is.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!is) throw ValidationError("truncated or unreadable file: " + path);
}

template <typename T>
T read_pod(std::istream& is, const std::string& path) {
    T v;
    read_bytes(is, &v, sizeof(T), path);
    return v;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open for reading: " + path);
    return is;
}

void expect_magic(std::istream& is, const char* magic, const std::string& path) {
    char buf[4];
    read_bytes(is, buf, 4, path);
    if (std::memcmp(buf, magic, 4) != 0)
        throw ValidationError(std::string("bad magic (expected ") + magic + "): " + path);
    std::uint32_t version = read_pod<std::uint32_t>(is, path);
    if (version != 1)
        throw ValidationError("unsupported container version in " + path);
}

}  // namespace

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

void write_evf(const std::string& path, const FrameContainer& c) {
    auto os = open_out(path);
    write_bytes(os, "EVF1", 4);
    write_pod<std::uint32_t>(os, 1);
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(c.t));
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(c.h));
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(c.w));
    write_pod<std::uint8_t>(os, c.dtype);
    write_pod<double>(os, c.frame_period);
    std::size_t n = c.t * c.h * c.w;
    if (c.dtype == 0) {
        if (c.u8_data.size() != n) throw ValidationError("EVF1 u8 payload size mismatch");
        write_bytes(os, c.u8_data.data(), n);
    } else if (c.dtype == 1 || c.dtype == 2) {
        if (c.f32_data.size() != n) throw ValidationError("EVF1 f32 payload size mismatch");
        write_bytes(os, c.f32_data.data(), n * sizeof(float));
    } else {
        throw ValidationError("unknown EVF1 dtype");
    }
    if (!os) throw ValidationError("write failed: " + path);
}

FrameContainer read_evf(const std::string& path) {
    auto is = open_in(path);
    expect_magic(is, "EVF1", path);
    FrameContainer c;
    c.t = read_pod<std::uint32_t>(is, path);
    c.h = read_pod<std::uint32_t>(is, path);
    c.w = read_pod<std::uint32_t>(is, path);
    c.dtype = read_pod<std::uint8_t>(is, path);
    c.frame_period = read_pod<double>(is, path);
    std::size_t n = c.t * c.h * c.w;
    if (c.dtype == 0) {
        c.u8_data.resize(n);
        read_bytes(is, c.u8_data.data(), n, path);
    } else if (c.dtype == 1 || c.dtype == 2) {
        c.f32_data.resize(n);
        read_bytes(is, c.f32_data.data(), n * sizeof(float), path);
    } else {
        throw ValidationError("unknown EVF1 dtype in " + path);
    }
    return c;
}

FrameContainer frame_container_from_log(const LogFrameStack& stack) {
    FrameContainer c;
    c.dtype = 1;
    c.t = stack.t;
    c.h = stack.h;
    c.w = stack.w;
    c.frame_period = stack.frame_period;
    c.f32_data = stack.frames;
    return c;
}

FrameContainer frame_container_from_depth(const DepthStack& depth) {
    FrameContainer c;
    c.dtype = 2;
    c.t = depth.t;
    c.h = depth.h;
    c.w = depth.w;
    c.frame_period = depth.frame_period;
    c.f32_data = depth.depths;
    return c;
}

FrameContainer frame_container_from_intensity_u8(const std::vector<float>& intensities,
                                                 std::size_t t, std::size_t h, std::size_t w,
                                                 double frame_period) {
    FrameContainer c;
    c.dtype = 0;
    c.t = t;
    c.h = h;
    c.w = w;
    c.frame_period = frame_period;
    c.u8_data.resize(intensities.size());
    for (std::size_t i = 0; i < intensities.size(); ++i) {
        float v = std::min(1.0f, std::max(0.0f, intensities[i]));
        c.u8_data[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    return c;
}

LogFrameStack to_log_stack(const FrameContainer& c, double epsilon) {
    if (c.dtype == 0) {
        std::vector<float> intensities(c.u8_data.size());
        for (std::size_t i = 0; i < c.u8_data.size(); ++i)
            intensities[i] = static_cast<float>(c.u8_data[i]) / 255.0f;
        return log_transform(intensities, c.t, c.h, c.w, epsilon, c.frame_period);
    }
    if (c.dtype == 1) {
        LogFrameStack s;
        s.t = c.t;
        s.h = c.h;
        s.w = c.w;
        s.frame_period = c.frame_period;
        s.frames = c.f32_data;
        s.validate();
        return s;
    }
    throw ValidationError("EVF1 dtype is not an intensity type");
}

DepthStack to_depth_stack(const FrameContainer& c) {
    if (c.dtype != 2) throw ValidationError("EVF1 dtype is not depth");
    DepthStack d;
    d.t = c.t;
    d.h = c.h;
    d.w = c.w;
    d.frame_period = c.frame_period;
    d.depths = c.f32_data;
    return d;
}

void write_evt(const std::string& path, const EventTensor& t) {
    auto os = open_out(path);
    write_bytes(os, "EVT1", 4);
    write_pod<std::uint32_t>(os, 1);
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(t.bins));
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(t.h));
    write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(t.w));
    write_bytes(os, t.counts.data(), t.counts.size() * sizeof(std::uint32_t));
    write_bytes(os, t.bin_boundaries.data(), t.bin_boundaries.size() * sizeof(std::uint32_t));
    if (!os) throw ValidationError("write failed: " + path);
}

EventTensor read_evt(const std::string& path) {
    auto is = open_in(path);
    expect_magic(is, "EVT1", path);
    EventTensor t;
    t.bins = read_pod<std::uint32_t>(is, path);
    t.h = read_pod<std::uint32_t>(is, path);
    t.w = read_pod<std::uint32_t>(is, path);
    t.counts.resize(2 * t.bins * t.h * t.w);
    read_bytes(is, t.counts.data(), t.counts.size() * sizeof(std::uint32_t), path);
    t.bin_boundaries.resize(t.bins + 1);
    read_bytes(is, t.bin_boundaries.data(), t.bin_boundaries.size() * sizeof(std::uint32_t),
               path);
    return t;
}

void write_evs(const std::string& path, const SparseEventStream& s) {
    auto os = open_out(path);
    write_bytes(os, "EVS1", 4);
    write_pod<std::uint32_t>(os, 1);
    write_pod<std::uint64_t>(os, s.events.size());
    for (const SparseEvent& e : s.events) {
        write_pod<std::uint32_t>(os, e.step);
        write_pod<std::uint16_t>(os, e.x);
        write_pod<std::uint16_t>(os, e.y);
        write_pod<std::int8_t>(os, e.polarity);
        const std::uint8_t pad[3] = {0, 0, 0};
        write_bytes(os, pad, 3);
    }
    if (!os) throw ValidationError("write failed: " + path);
}

SparseEventStream read_evs(const std::string& path) {
    auto is = open_in(path);
    expect_magic(is, "EVS1", path);
    std::uint64_t count = read_pod<std::uint64_t>(is, path);
    SparseEventStream s;
    s.events.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        SparseEvent& e = s.events[i];
        e.step = read_pod<std::uint32_t>(is, path);
        e.x = read_pod<std::uint16_t>(is, path);
        e.y = read_pod<std::uint16_t>(is, path);
        e.polarity = read_pod<std::int8_t>(is, path);
        std::uint8_t pad[3];
        read_bytes(is, pad, 3, path);
    }
    return s;
}

void write_scene_json(const std::string& path, const ForestScene& scene) {
    nlohmann::json j;
    j["world_box"] = {{"x_min", scene.world_box.x_min}, {"x_max", scene.world_box.x_max},
                      {"y_min", scene.world_box.y_min}, {"y_max", scene.world_box.y_max},
                      {"height", scene.world_box.height}};
    j["seed"] = scene.seed;
    j["background_albedo"] = scene.background_albedo;
    j["cylinders"] = nlohmann::json::array();
    for (const Cylinder& c : scene.cylinders)
        j["cylinders"].push_back({{"x", c.x}, {"y", c.y}, {"r", c.radius}, {"albedo", c.albedo}});
    auto os = open_out(path);
    os << j.dump(2) << "\n";
    if (!os) throw ValidationError("write failed: " + path);
}

ForestScene read_scene_json(const std::string& path) {
    auto is = open_in(path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("invalid scene JSON in " + path + ": " + e.what());
    }
    ForestScene scene;
    try {
        const auto& wb = j.at("world_box");
        scene.world_box.x_min = wb.at("x_min").get<double>();
        scene.world_box.x_max = wb.at("x_max").get<double>();
        scene.world_box.y_min = wb.at("y_min").get<double>();
        scene.world_box.y_max = wb.at("y_max").get<double>();
        scene.world_box.height = wb.at("height").get<double>();
        scene.seed = j.at("seed").get<std::uint64_t>();
        scene.background_albedo = j.at("background_albedo").get<double>();
        for (const auto& c : j.at("cylinders")) {
            Cylinder cyl;
            cyl.x = c.at("x").get<double>();
            cyl.y = c.at("y").get<double>();
            cyl.radius = c.at("r").get<double>();
            cyl.albedo = c.at("albedo").get<double>();
            scene.cylinders.push_back(cyl);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("missing or malformed scene field in " + path + ": " + e.what());
    }
    return scene;
}

void write_trajectory_csv(const std::string& path, const CameraTrajectory& traj) {
    auto os = open_out(path);
    os << "time,x,y,z,yaw,pitch,roll\n";
    for (const CameraPose& p : traj.poses) {
        os << format_g9(p.time) << ',' << format_g9(p.position.x) << ','
           << format_g9(p.position.y) << ',' << format_g9(p.position.z) << ','
           << format_g9(p.yaw) << ',' << format_g9(p.pitch) << ',' << format_g9(p.roll)
           << '\n';
    }
    if (!os) throw ValidationError("write failed: " + path);
}

CameraTrajectory read_trajectory_csv(const std::string& path) {
    auto is = open_in(path);
    std::string line;
    if (!std::getline(is, line) || line != "time,x,y,z,yaw,pitch,roll")
        throw ValidationError("bad trajectory CSV header in " + path);
    CameraTrajectory traj;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        CameraPose pose;
        char comma;
        if (!(ss >> pose.time >> comma >> pose.position.x >> comma >> pose.position.y >>
              comma >> pose.position.z >> comma >> pose.yaw >> comma >> pose.pitch >> comma >>
              pose.roll))
            throw ValidationError("bad trajectory CSV row in " + path + ": " + line);
        traj.poses.push_back(pose);
    }
    if (traj.poses.size() >= 2)
        traj.frame_period = traj.poses[1].time - traj.poses[0].time;
    traj.validate();
    return traj;
}

RewardWeights read_weights_json(const std::string& path) {
    auto is = open_in(path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("invalid weights JSON in " + path + ": " + e.what());
    }
    RewardWeights w;
    auto get = [&](const char* key, double& out) {
        if (j.contains(key)) out = j.at(key).get<double>();
    };
    get("prog", w.prog);
    get("act", w.act);
    get("br", w.br);
    get("perc", w.perc);
    get("obs_dist", w.obs_dist);
    get("crash", w.crash);
    for (const auto& [key, _] : j.items()) {
        static const std::vector<std::string> known = {"prog", "act",      "br",
                                                       "perc", "obs_dist", "crash"};
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ValidationError("unknown weight key '" + key + "' in " + path);
    }
    w.validate();
    return w;
}

}  // namespace evsim
