#include "evsim/event_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "evsim/parallel.hpp"

namespace evsim {

void LogFrameStack::validate() const {
    if (t < 1 || h < 1 || w < 1) throw ValidationError("frame stack dimensions must be >= 1");
    if (frames.size() != t * h * w) throw ValidationError("frame stack size/shape mismatch");
    if (frame_period <= 0.0) throw ValidationError("frame_period must be > 0");
    for (float v : frames) {
        if (!std::isfinite(v)) throw ValidationError("frame stack contains non-finite values");
    }
}

void ContrastConfig::validate() const {
    if (!(contrast > 0.0) || !std::isfinite(contrast))
        throw ValidationError("contrast must be a positive finite number");
    if (!std::isfinite(reference_offset))
        throw ValidationError("reference_offset must be finite");
    if (initial_direction != +1 && initial_direction != -1)
        throw ValidationError("initial_direction must be +1 or -1");
}

void BinningConfig::validate(std::size_t num_frames) const {
    if (num_bins < 1) throw ValidationError("num_bins must be >= 1");
    if (num_frames >= 2 && num_bins > num_frames - 1)
        throw ValidationError("num_bins must not exceed the number of transitions");
}

std::uint64_t EventTensor::total() const {
    std::uint64_t s = 0;
    for (std::uint32_t c : counts) s += c;
    return s;
}

EventTensor EventTensor::zeros(std::size_t bins, std::size_t h, std::size_t w,
                               std::size_t num_frames) {
    EventTensor out;
    out.bins = bins;
    out.h = h;
    out.w = w;
    out.counts.assign(2 * bins * h * w, 0);
    out.bin_boundaries.resize(bins + 1);
    std::size_t transitions = num_frames - 1;
    for (std::size_t j = 0; j <= bins; ++j) {
        // smallest transition index mapped into bin j
        out.bin_boundaries[j] =
            static_cast<std::uint32_t>((j * transitions + bins - 1) / bins);
    }
    out.bin_boundaries[0] = 0;
    out.bin_boundaries[bins] = static_cast<std::uint32_t>(transitions);
    return out;
}

void SparseEventStream::sort() {
    std::sort(events.begin(), events.end(), [](const SparseEvent& a, const SparseEvent& b) {
        if (a.step != b.step) return a.step < b.step;
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        return a.polarity < b.polarity;
    });
}

std::size_t bin_index_for_step(std::size_t step, std::size_t num_frames,
                               std::uint32_t num_bins) {
    return (step - 1) * num_bins / (num_frames - 1);
}

LogFrameStack log_transform(const std::vector<float>& intensities, std::size_t t,
                            std::size_t h, std::size_t w, double epsilon,
                            double frame_period, double t0) {
    if (!(epsilon > 0.0)) throw ValidationError("epsilon must be > 0");
    if (intensities.size() != t * h * w)
        throw ValidationError("intensity buffer size/shape mismatch");
    LogFrameStack out;
    out.t = t;
    out.h = h;
    out.w = w;
    out.frame_period = frame_period;
    out.t0 = t0;
    out.frames.resize(intensities.size());
    for (std::size_t i = 0; i < intensities.size(); ++i) {
        float v = intensities[i];
        if (!std::isfinite(v) || v < 0.0f)
            throw ValidationError("intensities must be finite and non-negative");
        out.frames[i] = std::log(v + static_cast<float>(epsilon));
    }
    out.validate();
    return out;
}

namespace {

// floor(normalized / contrast) with the reciprocal hoisted out of the hot
// loops and the floor done with a cast (plain x86-64 lowers std::floor to a
// libm call, and packed double->int32 conversion exists in SSE2 where
// double->int64 does not). Every band consumer must use this same
// expression so the vectorized and sequential paths quantize identically;
// likewise every path normalizes a sample as cur + (-l0 - offset), frame 0
// being identically -offset.
inline std::int32_t band_of(double normalized, double inv_contrast) {
    double q = normalized * inv_contrast;
    std::int32_t b = static_cast<std::int32_t>(q);
    return b - (q < static_cast<double>(b) ? 1 : 0);
}

// Quantize one row of samples: band[x] = band_of(cur[x] + neg_ref[x]).
// GCC will not auto-vectorize the double -> int32 narrowing, so the hot
// path is written with SSE2 intrinsics; cvttpd truncates exactly like the
// scalar cast, so both variants produce identical bands.
#if defined(__SSE2__)
#include <emmintrin.h>
inline void band_row(const float* cur, const double* neg_ref, double inv_c,
                     std::int32_t* band, std::size_t w) {
    const __m128d vinv = _mm_set1_pd(inv_c);
    std::size_t x = 0;
    for (; x + 4 <= w; x += 4) {
        __m128 f = _mm_loadu_ps(cur + x);
        __m128d q0 =
            _mm_mul_pd(_mm_add_pd(_mm_cvtps_pd(f), _mm_loadu_pd(neg_ref + x)), vinv);
        __m128d q1 = _mm_mul_pd(
            _mm_add_pd(_mm_cvtps_pd(_mm_movehl_ps(f, f)), _mm_loadu_pd(neg_ref + x + 2)),
            vinv);
        __m128i b = _mm_unpacklo_epi64(_mm_cvttpd_epi32(q0), _mm_cvttpd_epi32(q1));
        __m128d r0 = _mm_cvtepi32_pd(b);
        __m128d r1 = _mm_cvtepi32_pd(_mm_shuffle_epi32(b, _MM_SHUFFLE(1, 0, 3, 2)));
        __m128i m0 = _mm_castpd_si128(_mm_cmplt_pd(q0, r0));
        __m128i m1 = _mm_castpd_si128(_mm_cmplt_pd(q1, r1));
        // low 32 bits of each 64-bit compare mask, packed to 4 int32 lanes;
        // adding the all-ones mask is the -1 floor adjustment
        __m128i adj = _mm_castps_si128(_mm_shuffle_ps(
            _mm_castsi128_ps(m0), _mm_castsi128_ps(m1), _MM_SHUFFLE(2, 0, 2, 0)));
        _mm_storeu_si128(reinterpret_cast<__m128i*>(band + x), _mm_add_epi32(b, adj));
    }
    for (; x < w; ++x)
        band[x] = band_of(static_cast<double>(cur[x]) + neg_ref[x], inv_c);
}
#else
inline void band_row(const float* cur, const double* neg_ref, double inv_c,
                     std::int32_t* band, std::size_t w) {
    for (std::size_t x = 0; x < w; ++x)
        band[x] = band_of(static_cast<double>(cur[x]) + neg_ref[x], inv_c);
}
#endif

}  // namespace

BandStack band_quantize(const LogFrameStack& stack, const ContrastConfig& cfg) {
    stack.validate();
    cfg.validate();
    BandStack out;
    out.t = stack.t;
    out.h = stack.h;
    out.w = stack.w;
    out.band_ids.resize(stack.frames.size());
    const std::size_t plane = stack.h * stack.w;
    const double inv_c = 1.0 / cfg.contrast;
    const std::int32_t band0 = band_of(-cfg.reference_offset, inv_c);
    for (std::size_t i = 0; i < plane; ++i) out.band_ids[i] = band0;
    for (std::size_t ti = 1; ti < stack.t; ++ti) {
        for (std::size_t i = 0; i < plane; ++i) {
            double neg = -static_cast<double>(stack.frames[i]) - cfg.reference_offset;
            double s = static_cast<double>(stack.frames[ti * plane + i]) + neg;
            out.band_ids[ti * plane + i] = band_of(s, inv_c);
        }
    }
    return out;
}

EventTensor vectorized_event_tensor(const LogFrameStack& stack, const ContrastConfig& cfg,
                                    const BinningConfig& bins, unsigned num_threads) {
    stack.validate();
    cfg.validate();
    if (stack.t < 2) throw ValidationError("at least two frames are required");
    bins.validate(stack.t);

    EventTensor out = EventTensor::zeros(bins.num_bins, stack.h, stack.w, stack.t);

    // Precompute the bin for each transition step once.
    std::vector<std::uint32_t> step_bin(stack.t);
    for (std::size_t s = 1; s < stack.t; ++s)
        step_bin[s] = static_cast<std::uint32_t>(bin_index_for_step(s, stack.t, bins.num_bins));

    const std::size_t plane = stack.h * stack.w;
    const double inv_c = 1.0 / cfg.contrast;
    const double offset = cfg.reference_offset;

    parallel_for(stack.h, num_threads, [&](std::size_t row_begin, std::size_t row_end) {
        const std::int32_t band0 = band_of(-offset, inv_c);
        std::vector<double> neg_ref(stack.w);
        std::vector<std::int32_t> band(stack.w);
        std::vector<std::int32_t> prev_band(stack.w);
        std::vector<std::int8_t> last_sign(stack.w);
        for (std::size_t y = row_begin; y < row_end; ++y) {
            const float* base = stack.frames.data() + y * stack.w;
            for (std::size_t x = 0; x < stack.w; ++x) {
                neg_ref[x] = -static_cast<double>(base[x]) - offset;
                prev_band[x] = band0;  // normalized first frame is always -offset
                last_sign[x] = static_cast<std::int8_t>(cfg.initial_direction);
            }
            for (std::size_t ti = 1; ti < stack.t; ++ti) {
                const float* cur = base + ti * plane;
                const std::uint32_t bin = step_bin[ti];
                band_row(cur, neg_ref.data(), inv_c, band.data(), stack.w);
                auto crossings_at = [&](std::size_t x) {
                    std::int32_t b = band[x];
                    std::int32_t d = b - prev_band[x];
                    if (d == 0) return;
                    std::int8_t sign = d > 0 ? std::int8_t{1} : std::int8_t{-1};
                    // |d| unit crossings; the first fires only when it
                    // continues in the direction of the previous one.
                    std::uint32_t fired = static_cast<std::uint32_t>(d > 0 ? d : -d);
                    if (sign != last_sign[x]) --fired;
                    if (fired > 0) {
                        int pol_index = sign > 0 ? 0 : 1;
                        out.at(pol_index, bin, y, x) += fired;
                    }
                    last_sign[x] = sign;
                    prev_band[x] = b;
                };
                for (std::size_t x = 0; x < stack.w; ++x) crossings_at(x);
            }
        }
    });
    return out;
}

SparseEventStream oracle_event_stream(const LogFrameStack& stack, const ContrastConfig& cfg) {
    stack.validate();
    cfg.validate();
    if (stack.t < 2) throw ValidationError("at least two frames are required");

    const double inv_c = 1.0 / cfg.contrast;
    const std::size_t plane = stack.h * stack.w;
    SparseEventStream out;

    for (std::size_t y = 0; y < stack.h; ++y) {
        for (std::size_t x = 0; x < stack.w; ++x) {
            const float* base = stack.frames.data() + y * stack.w + x;
            const double neg = -static_cast<double>(base[0]) - cfg.reference_offset;
            // The reference edge sits at e * C: the lower band edge for +1,
            // the upper edge for -1.  Tracking the integer edge rather than
            // an accumulated double keeps repeated +-C updates from
            // drifting, and a positive crossing fires at s >= (e + 1) * C,
            // i.e. exactly when floor(s / C) >= e + 1.
            std::int32_t e = band_of(-cfg.reference_offset, inv_c);
            if (cfg.initial_direction == -1) ++e;
            for (std::size_t ti = 1; ti < stack.t; ++ti) {
                double s = static_cast<double>(base[ti * plane]) + neg;
                std::int32_t b = band_of(s, inv_c);
                while (b > e) {
                    out.events.push_back({static_cast<std::uint32_t>(ti),
                                          static_cast<std::uint16_t>(x),
                                          static_cast<std::uint16_t>(y), std::int8_t{1}});
                    ++e;
                }
                while (b < e - 1) {
                    out.events.push_back({static_cast<std::uint32_t>(ti),
                                          static_cast<std::uint16_t>(x),
                                          static_cast<std::uint16_t>(y), std::int8_t{-1}});
                    --e;
                }
            }
        }
    }
    out.sort();
    return out;
}

EventTensor accumulate_tensor(const SparseEventStream& stream, std::size_t num_frames,
                              std::size_t h, std::size_t w, const BinningConfig& bins) {
    if (num_frames < 2) throw ValidationError("at least two frames are required");
    bins.validate(num_frames);
    EventTensor out = EventTensor::zeros(bins.num_bins, h, w, num_frames);
    for (const SparseEvent& e : stream.events) {
        if (e.step < 1 || e.step >= num_frames)
            throw ValidationError("event step out of range");
        if (e.x >= w || e.y >= h) throw ValidationError("event coordinate out of range");
        std::size_t bin = bin_index_for_step(e.step, num_frames, bins.num_bins);
        out.at(e.polarity > 0 ? 0 : 1, bin, e.y, e.x) += 1;
    }
    return out;
}

SparseEventStream downsample_stream(const SparseEventStream& stream, std::uint32_t divisor,
                                    std::size_t out_width, std::size_t out_height) {
    if (divisor < 1) throw ValidationError("divisor must be >= 1");
    if (out_width < 1 || out_height < 1)
        throw ValidationError("output dimensions must be positive");
    SparseEventStream out;
    out.events.reserve(stream.events.size());
    for (SparseEvent e : stream.events) {
        std::size_t nx = std::min<std::size_t>(e.x / divisor, out_width - 1);
        std::size_t ny = std::min<std::size_t>(e.y / divisor, out_height - 1);
        e.x = static_cast<std::uint16_t>(nx);
        e.y = static_cast<std::uint16_t>(ny);
        out.events.push_back(e);
    }
    out.sort();
    return out;
}

DiffReport diff_tensors(const EventTensor& lhs, const EventTensor& rhs) {
    if (lhs.bins != rhs.bins || lhs.h != rhs.h || lhs.w != rhs.w)
        throw ValidationError("tensor shape mismatch");
    DiffReport report;
    for (int p = 0; p < 2; ++p) {
        for (std::size_t b = 0; b < lhs.bins; ++b) {
            for (std::size_t y = 0; y < lhs.h; ++y) {
                for (std::size_t x = 0; x < lhs.w; ++x) {
                    std::uint32_t a = lhs.at(p, b, y, x);
                    std::uint32_t c = rhs.at(p, b, y, x);
                    if (a != c) {
                        report.total_abs_difference += a > c ? a - c : c - a;
                        if (report.num_mismatched_cells == 0)
                            report.first_mismatch = DiffReport::Mismatch{p, b, y, x, a, c};
                        ++report.num_mismatched_cells;
                    }
                }
            }
        }
    }
    return report;
}

}  // namespace evsim
