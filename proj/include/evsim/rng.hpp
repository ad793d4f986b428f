#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace evsim {

// Deterministic RNG helpers. std::mt19937_64 gives a portable bit stream;
// the distributions below are hand-rolled because the std distribution
// implementations are not specified bit-exactly across standard libraries,
// and seeded reproducibility is part of the contract.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform in (0, 1].
    double uniform01_open_low() {
        return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller, two draws per call (no cached spare, keeps state minimal).
    double normal() {
        double u1 = uniform01_open_low();
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    }

    // Counts unit-exponential inter-arrival times; valid for large means
    // where the classic product-of-uniforms method underflows.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        std::uint64_t count = 0;
        double acc = 0.0;
        for (;;) {
            acc += -std::log(uniform01_open_low());
            if (acc >= mean) break;
            ++count;
        }
        return count;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace evsim
