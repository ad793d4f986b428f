#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evsim/common.hpp"

namespace evsim {

// T x H x W log-intensity frames with a fixed frame period.
struct LogFrameStack {
    std::size_t t = 0, h = 0, w = 0;
    std::vector<float> frames;  // row-major [t][y][x]
    double frame_period = 0.0;  // seconds
    double t0 = 0.0;            // seconds

    float& at(std::size_t ti, std::size_t y, std::size_t x) {
        return frames[(ti * h + y) * w + x];
    }
    float at(std::size_t ti, std::size_t y, std::size_t x) const {
        return frames[(ti * h + y) * w + x];
    }

    void validate() const;
};

struct ContrastConfig {
    double contrast = 0.2;          // C, log-intensity units, > 0
    double reference_offset = 0.0;  // subtracted at normalization
    int initial_direction = +1;     // sign of the virtual initial crossing

    void validate() const;
};

// Per-pixel, per-frame contrast band indices.
struct BandStack {
    std::size_t t = 0, h = 0, w = 0;
    std::vector<std::int64_t> band_ids;  // row-major [t][y][x]

    std::int64_t at(std::size_t ti, std::size_t y, std::size_t x) const {
        return band_ids[(ti * h + y) * w + x];
    }
};

struct BinningConfig {
    std::uint32_t num_bins = 5;

    void validate(std::size_t num_frames) const;
};

// 2 x B x H x W event counts, polarity order [positive, negative].
struct EventTensor {
    std::size_t bins = 0, h = 0, w = 0;
    std::vector<std::uint32_t> counts;           // [polarity][bin][y][x]
    std::vector<std::uint32_t> bin_boundaries;   // B+1 transition indices

    std::uint32_t& at(int polarity_index, std::size_t bin, std::size_t y, std::size_t x) {
        return counts[((polarity_index * bins + bin) * h + y) * w + x];
    }
    std::uint32_t at(int polarity_index, std::size_t bin, std::size_t y, std::size_t x) const {
        return counts[((polarity_index * bins + bin) * h + y) * w + x];
    }
    std::uint64_t total() const;

    static EventTensor zeros(std::size_t bins, std::size_t h, std::size_t w,
                             std::size_t num_frames);
};

struct SparseEvent {
    std::uint32_t step;  // transition index, 1..T-1
    std::uint16_t x;
    std::uint16_t y;
    std::int8_t polarity;  // +1 or -1
};

// Ordered by (step, y, x, polarity).
struct SparseEventStream {
    std::vector<SparseEvent> events;

    void sort();
};

struct DiffReport {
    std::uint64_t total_abs_difference = 0;
    std::uint64_t num_mismatched_cells = 0;
    struct Mismatch {
        int polarity_index;
        std::size_t bin, y, x;
        std::uint32_t lhs, rhs;
    };
    std::optional<Mismatch> first_mismatch;

    bool equal() const { return total_abs_difference == 0; }
};

// frames = ln(intensity + epsilon); intensities expected in [0, 1].
LogFrameStack log_transform(const std::vector<float>& intensities, std::size_t t,
                            std::size_t h, std::size_t w, double epsilon,
                            double frame_period, double t0 = 0.0);

// band = floor((L_t - L_0 - offset) / C); exact band edges belong upward.
BandStack band_quantize(const LogFrameStack& stack, const ContrastConfig& cfg);

// Band-difference event generation: band IDs are first-differenced, each
// nonzero step expands into unit crossings, and adjacent equal crossing
// signs fire events at the later crossing's step. A virtual crossing of
// sign cfg.initial_direction precedes the sequence.
EventTensor vectorized_event_tensor(const LogFrameStack& stack, const ContrastConfig& cfg,
                                    const BinningConfig& bins, unsigned num_threads = 1);

// Exact sequential reference: per pixel, a moving reference level fires an
// event each time the normalized signal departs from it by at least C.
SparseEventStream oracle_event_stream(const LogFrameStack& stack, const ContrastConfig& cfg);

// bin = floor((step-1) * B / (T-1)) over 1-based transition steps.
EventTensor accumulate_tensor(const SparseEventStream& stream, std::size_t num_frames,
                              std::size_t h, std::size_t w, const BinningConfig& bins);

// Integer-division coordinate downsampling, edge pixels clamped into range.
SparseEventStream downsample_stream(const SparseEventStream& stream, std::uint32_t divisor,
                                    std::size_t out_width, std::size_t out_height);

DiffReport diff_tensors(const EventTensor& lhs, const EventTensor& rhs);

std::size_t bin_index_for_step(std::size_t step, std::size_t num_frames, std::uint32_t num_bins);

}  // namespace evsim
