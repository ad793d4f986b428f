#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evsim/event_core.hpp"

namespace evsim {

struct BenchConfig {
    std::vector<std::size_t> env_counts = {1, 5, 10, 15, 20, 25};
    std::size_t height = 240, width = 320;
    std::size_t frames = 240;
    double contrast = 0.2;
    std::uint32_t num_bins = 5;
    std::size_t repetitions = 3;  // plus one discarded warm-up run
    std::uint64_t seed = 1;
    bool measure_time = true;  // false zeroes the wall-clock columns

    void validate() const;
};

struct BenchRow {
    std::string method;  // "vectorized" or "oracle"
    std::size_t env_count = 0;
    double mean_runtime_s = 0.0;
    double max_runtime_s = 0.0;
    std::uint64_t peak_logical_bytes = 0;
    std::uint64_t mean_logical_bytes = 0;
    bool correctness_checked = false;
};

struct BenchReport {
    BenchConfig config;
    std::vector<BenchRow> rows;  // sorted by (method, env_count)
};

// Tracks the byte sizes of the buffers each execution path holds alive,
// independent of wall-clock. Peak is the maximum concurrent sum; mean
// averages the concurrent sum over alloc/free transitions.
class LogicalMemoryModel {
public:
    void alloc(std::uint64_t bytes);
    void free(std::uint64_t bytes);
    std::uint64_t peak() const { return peak_; }
    std::uint64_t mean() const;

private:
    void sample();
    std::uint64_t current_ = 0;
    std::uint64_t peak_ = 0;
    std::uint64_t sample_sum_ = 0;
    std::uint64_t sample_count_ = 0;
};

// Smooth per-pixel random-walk log-intensity stack; event rates resemble
// real footage rather than white noise.
LogFrameStack make_bench_stack(std::size_t frames, std::size_t h, std::size_t w,
                               std::uint64_t seed);

BenchReport run_benchmark(const BenchConfig& cfg);

// CSV: method,env_count,mean_runtime_s,max_runtime_s,peak_bytes,mean_bytes,correct
void write_report(const BenchReport& report, const std::string& path);
std::vector<BenchRow> read_report(const std::string& path);

}  // namespace evsim
