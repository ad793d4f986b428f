#include <cmath>
#include <doctest.h>

#include "evsim/event_core.hpp"
#include "evsim/rng.hpp"
#include "test_util.hpp"

using namespace evsim;
using testutil::band_safe_stack;
using testutil::single_pixel_stack;

namespace {

EventTensor oracle_tensor(const LogFrameStack& stack, const ContrastConfig& cfg,
                          const BinningConfig& bins) {
    return accumulate_tensor(oracle_event_stream(stack, cfg), stack.t, stack.h, stack.w, bins);
}

}  // namespace

TEST_CASE("log_transform pointwise values") {
    std::vector<float> zeros(4, 0.0f);
    LogFrameStack s = log_transform(zeros, 2, 1, 2, 1e-3, 0.01);
    for (float v : s.frames) CHECK(v == doctest::Approx(std::log(1e-3)).epsilon(1e-6));

    std::vector<float> ones(2, 1.0f);
    LogFrameStack s1 = log_transform(ones, 2, 1, 1, 1e-3, 0.01);
    CHECK(s1.frames[0] == doctest::Approx(std::log(1.001)).epsilon(1e-6));

    // identical frames stay identical
    std::vector<float> two = {0.25f, 0.5f, 0.25f, 0.5f};
    LogFrameStack s2 = log_transform(two, 2, 1, 2, 1e-3, 0.01);
    CHECK(s2.frames[0] == s2.frames[2]);
    CHECK(s2.frames[1] == s2.frames[3]);
}

TEST_CASE("log_transform rejects bad input") {
    std::vector<float> neg = {-0.1f};
    CHECK_THROWS_AS(log_transform(neg, 1, 1, 1, 1e-3, 0.01), ValidationError);
    std::vector<float> ok = {0.1f};
    CHECK_THROWS_AS(log_transform(ok, 1, 1, 1, 0.0, 0.01), ValidationError);
    std::vector<float> nan = {std::numeric_limits<float>::quiet_NaN()};
    CHECK_THROWS_AS(log_transform(nan, 1, 1, 1, 1e-3, 0.01), ValidationError);
}

TEST_CASE("band_quantize basic values") {
    LogFrameStack s = single_pixel_stack({0.0, 0.25}, 0.0);
    BandStack b = band_quantize(s, ContrastConfig{0.2, 0.0, +1});
    CHECK(b.at(0, 0, 0) == 0);
    CHECK(b.at(1, 0, 0) == 1);  // floor(0.25 / 0.2)

    // offset shifts frame 0 below zero
    LogFrameStack s2 = single_pixel_stack({0.0, 0.0}, 0.5);
    BandStack b2 = band_quantize(s2, ContrastConfig{1.0, 0.5, +1});
    CHECK(b2.at(0, 0, 0) == -1);  // floor(-0.5)

    // a value exactly on a band edge belongs to the upper band
    LogFrameStack s3 = single_pixel_stack({0.0, 0.5}, 0.0);
    BandStack b3 = band_quantize(s3, ContrastConfig{0.5, 0.0, +1});
    CHECK(b3.at(1, 0, 0) == 1);
}

TEST_CASE("vectorized: constant frames give a zero tensor") {
    LogFrameStack s = single_pixel_stack({0.0, 0.0, 0.0}, 0.0);
    EventTensor t = vectorized_event_tensor(s, ContrastConfig{1.0, 0.0, +1}, BinningConfig{1});
    CHECK(t.total() == 0);
}

TEST_CASE("vectorized: hysteresis trace [0, 1.2, 0.3, -1.1]") {
    LogFrameStack s = single_pixel_stack({0.0, 1.2, 0.3, -1.1}, 0.0);
    ContrastConfig cfg{1.0, 0.0, +1};
    EventTensor t = vectorized_event_tensor(s, cfg, BinningConfig{1});
    CHECK(t.at(0, 0, 0, 0) == 1);  // positive event at step 1
    CHECK(t.at(1, 0, 0, 0) == 2);  // two negative events at step 3
    EventTensor o = oracle_tensor(s, cfg, BinningConfig{1});
    CHECK(diff_tensors(t, o).equal());
}

TEST_CASE("vectorized: multi-crossing jump [0, 3.5]") {
    LogFrameStack s = single_pixel_stack({0.0, 3.5}, 0.0);
    EventTensor t = vectorized_event_tensor(s, ContrastConfig{1.0, 0.0, +1}, BinningConfig{1});
    CHECK(t.at(0, 0, 0, 0) == 3);
    CHECK(t.at(1, 0, 0, 0) == 0);
}

TEST_CASE("vectorized rejects single-frame stacks") {
    LogFrameStack s = single_pixel_stack({0.0}, 0.0);
    CHECK_THROWS_AS(vectorized_event_tensor(s, ContrastConfig{1.0, 0.0, +1}, BinningConfig{1}),
                    ValidationError);
}

TEST_CASE("oracle: simple traces") {
    ContrastConfig cfg{1.0, 0.0, +1};

    SparseEventStream empty =
        oracle_event_stream(single_pixel_stack({0.0, 0.0, 0.0}, 0.0), cfg);
    CHECK(empty.events.empty());

    SparseEventStream up =
        oracle_event_stream(single_pixel_stack({0.0, 0.9, 1.8, 2.5}, 0.0), cfg);
    REQUIRE(up.events.size() == 2);
    CHECK(up.events[0].step == 2);
    CHECK(up.events[0].polarity == 1);
    CHECK(up.events[1].step == 3);
    CHECK(up.events[1].polarity == 1);

    SparseEventStream down =
        oracle_event_stream(single_pixel_stack({0.0, -0.5, -1.2}, 0.0), cfg);
    REQUIRE(down.events.size() == 1);
    CHECK(down.events[0].step == 2);
    CHECK(down.events[0].polarity == -1);
}

TEST_CASE("oracle: initial_direction -1 starts at the upper band edge") {
    // with the reference at +C, a drop of 1.5C fires twice
    LogFrameStack s = single_pixel_stack({0.0, -1.5}, 0.0);
    SparseEventStream neg = oracle_event_stream(s, ContrastConfig{1.0, 0.0, -1});
    CHECK(neg.events.size() == 2);
    SparseEventStream pos = oracle_event_stream(s, ContrastConfig{1.0, 0.0, +1});
    CHECK(pos.events.size() == 1);
}

TEST_CASE("accumulate_tensor: bin mapping and conservation") {
    BinningConfig two{2};
    SparseEventStream s;
    for (std::uint32_t step = 1; step <= 10; ++step)
        s.events.push_back({step, 0, 0, 1});
    EventTensor t = accumulate_tensor(s, 11, 1, 1, two);
    CHECK(t.at(0, 0, 0, 0) == 5);  // steps 1..5
    CHECK(t.at(0, 1, 0, 0) == 5);  // steps 6..10
    CHECK(t.total() == s.events.size());
    CHECK(t.bin_boundaries == std::vector<std::uint32_t>{0, 5, 10});

    EventTensor zero = accumulate_tensor(SparseEventStream{}, 11, 1, 1, two);
    CHECK(zero.total() == 0);

    SparseEventStream bad;
    bad.events.push_back({11, 0, 0, 1});
    CHECK_THROWS_AS(accumulate_tensor(bad, 11, 1, 1, two), ValidationError);
}

TEST_CASE("accumulate conserves counts on random streams") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t t = 2 + static_cast<std::size_t>(rng.uniform(0.0, 30.0));
        SparseEventStream s;
        std::size_t n = static_cast<std::size_t>(rng.uniform(0.0, 200.0));
        for (std::size_t i = 0; i < n; ++i) {
            s.events.push_back({static_cast<std::uint32_t>(1 + rng.uniform(0.0, 0.999) *
                                                                   static_cast<double>(t - 1)),
                                static_cast<std::uint16_t>(rng.uniform(0.0, 8.0)),
                                static_cast<std::uint16_t>(rng.uniform(0.0, 8.0)),
                                rng.uniform01() < 0.5 ? std::int8_t{1} : std::int8_t{-1}});
        }
        std::uint32_t bins = 1 + static_cast<std::uint32_t>(rng.uniform(0.0, 0.999) *
                                                            static_cast<double>(t - 1));
        EventTensor tensor = accumulate_tensor(s, t, 8, 8, BinningConfig{bins});
        CHECK(tensor.total() == s.events.size());
    }
}

TEST_CASE("downsample_stream coordinate mapping") {
    SparseEventStream s;
    s.events.push_back({1, 0, 0, 1});
    s.events.push_back({1, 639, 479, -1});
    SparseEventStream d = downsample_stream(s, 3, 213, 160);
    REQUIRE(d.events.size() == 2);
    CHECK(d.events[0].x == 0);
    CHECK(d.events[0].y == 0);
    CHECK(d.events[1].x == 212);  // floor(639/3) = 213 clamps to width-1
    CHECK(d.events[1].y == 159);

    CHECK_THROWS_AS(downsample_stream(s, 0, 213, 160), ValidationError);
    CHECK_THROWS_AS(downsample_stream(s, 3, 0, 160), ValidationError);
}

TEST_CASE("diff_tensors") {
    EventTensor a = EventTensor::zeros(2, 2, 2, 5);
    CHECK(diff_tensors(a, a).equal());

    EventTensor b = a;
    b.at(0, 0, 0, 0) = 1;
    DiffReport r = diff_tensors(a, b);
    CHECK(r.total_abs_difference == 1);
    CHECK(r.num_mismatched_cells == 1);
    REQUIRE(r.first_mismatch.has_value());
    CHECK(r.first_mismatch->polarity_index == 0);

    EventTensor c = EventTensor::zeros(3, 2, 2, 5);
    CHECK_THROWS_AS(diff_tensors(a, c), ValidationError);
}

TEST_CASE("property: oracle equivalence on randomized stacks") {
    Rng rng(2024);
    const double contrasts[] = {0.1, 0.2, 0.5, 1.0};
    for (int trial = 0; trial < 150; ++trial) {
        double c = contrasts[trial % 4];
        double offset = (trial % 3 == 0) ? 0.0 : (trial % 3 == 1 ? 0.5 * c : 0.3 * c);
        int dir = (trial % 2 == 0) ? +1 : -1;
        std::size_t t = 2 + static_cast<std::size_t>(rng.uniform(0.0, 12.0));
        std::size_t h = 1 + static_cast<std::size_t>(rng.uniform(0.0, 5.0));
        std::size_t w = 1 + static_cast<std::size_t>(rng.uniform(0.0, 5.0));
        LogFrameStack stack = band_safe_stack(t, h, w, c, offset, rng);
        ContrastConfig cfg{c, offset, dir};
        std::uint32_t bins = 1 + static_cast<std::uint32_t>(rng.uniform(0.0, 0.999) *
                                                            static_cast<double>(t - 1));
        EventTensor vec = vectorized_event_tensor(stack, cfg, BinningConfig{bins});
        EventTensor ora = oracle_tensor(stack, cfg, BinningConfig{bins});
        DiffReport d = diff_tensors(vec, ora);
        CAPTURE(trial);
        CHECK(d.total_abs_difference == 0);
    }
}

TEST_CASE("property: crossing-count conservation") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        double c = 0.25;
        int dir = trial % 2 == 0 ? +1 : -1;
        LogFrameStack stack = band_safe_stack(10, 3, 3, c, 0.0, rng);
        ContrastConfig cfg{c, 0.0, dir};
        BandStack bands = band_quantize(stack, cfg);

        std::uint64_t total_crossings = 0;
        std::uint64_t alternations = 0;
        const std::size_t plane = stack.h * stack.w;
        for (std::size_t p = 0; p < plane; ++p) {
            int last = dir;
            for (std::size_t ti = 1; ti < stack.t; ++ti) {
                std::int64_t d = bands.band_ids[ti * plane + p] -
                                 bands.band_ids[(ti - 1) * plane + p];
                if (d == 0) continue;
                int sign = d > 0 ? 1 : -1;
                total_crossings += static_cast<std::uint64_t>(d > 0 ? d : -d);
                if (sign != last) ++alternations;
                last = sign;
            }
        }
        EventTensor vec = vectorized_event_tensor(stack, cfg, BinningConfig{3});
        CHECK(vec.total() == total_crossings - alternations);
        CHECK(oracle_event_stream(stack, cfg).events.size() == vec.total());
    }
}

TEST_CASE("property: monotone signals have a single polarity") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> sig{0.0};
        double v = 0.0;
        for (int i = 0; i < 12; ++i) {
            v += rng.uniform(0.02, 0.9);
            sig.push_back(v);
        }
        LogFrameStack up = single_pixel_stack(sig, 0.0);
        EventTensor t = vectorized_event_tensor(up, ContrastConfig{0.3, 0.0, +1},
                                                BinningConfig{2});
        std::uint64_t neg = 0;
        for (std::size_t b = 0; b < t.bins; ++b) neg += t.at(1, b, 0, 0);
        CHECK(neg == 0);

        for (double& x : sig) x = -x;
        LogFrameStack down = single_pixel_stack(sig, 0.0);
        EventTensor t2 = vectorized_event_tensor(down, ContrastConfig{0.3, 0.0, +1},
                                                 BinningConfig{2});
        std::uint64_t pos = 0;
        for (std::size_t b = 0; b < t2.bins; ++b) pos += t2.at(0, b, 0, 0);
        CHECK(pos == 0);
    }
}

TEST_CASE("property: adding C to the offset relabels bands, same events") {
    Rng rng(17);
    double c = 0.4;
    LogFrameStack stack = band_safe_stack(8, 4, 4, c, 0.1 * c, rng);
    ContrastConfig base{c, 0.1 * c, +1};
    ContrastConfig shifted{c, 0.1 * c + c, +1};

    BandStack b0 = band_quantize(stack, base);
    BandStack b1 = band_quantize(stack, shifted);
    for (std::size_t i = 0; i < b0.band_ids.size(); ++i)
        CHECK(b1.band_ids[i] == b0.band_ids[i] - 1);

    EventTensor t0 = vectorized_event_tensor(stack, base, BinningConfig{3});
    EventTensor t1 = vectorized_event_tensor(stack, shifted, BinningConfig{3});
    CHECK(diff_tensors(t0, t1).equal());
}

TEST_CASE("property: thread partitioning does not change the result") {
    Rng rng(31);
    LogFrameStack stack = band_safe_stack(12, 16, 9, 0.2, 0.0, rng);
    ContrastConfig cfg{0.2, 0.0, +1};
    EventTensor t1 = vectorized_event_tensor(stack, cfg, BinningConfig{4}, 1);
    for (unsigned threads : {2u, 4u, 7u}) {
        EventTensor tn = vectorized_event_tensor(stack, cfg, BinningConfig{4}, threads);
        CHECK(diff_tensors(t1, tn).equal());
    }
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS((ContrastConfig{0.0, 0.0, +1}).validate(), ValidationError);
    CHECK_THROWS_AS((ContrastConfig{1.0, 0.0, 2}).validate(), ValidationError);
    CHECK_THROWS_AS(BinningConfig{0}.validate(10), ValidationError);
    CHECK_THROWS_AS(BinningConfig{10}.validate(10), ValidationError);
    CHECK_NOTHROW(BinningConfig{9}.validate(10));
}
