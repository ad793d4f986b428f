#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace evsim {

// Splits [0, n) into num_threads contiguous chunks and runs fn(begin, end)
// on each. The partition depends only on (n, num_threads), so any function
// writing disjoint outputs per index is bit-deterministic for every thread
// count.
inline void parallel_for(std::size_t n, unsigned num_threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (num_threads <= 1 || n <= 1) {
        fn(0, n);
        return;
    }
    if (num_threads > n) num_threads = static_cast<unsigned>(n);
    std::vector<std::thread> workers;
    workers.reserve(num_threads);
    std::size_t chunk = n / num_threads;
    std::size_t rem = n % num_threads;
    std::size_t begin = 0;
    for (unsigned i = 0; i < num_threads; ++i) {
        std::size_t len = chunk + (i < rem ? 1 : 0);
        std::size_t end = begin + len;
        workers.emplace_back([&fn, begin, end] { fn(begin, end); });
        begin = end;
    }
    for (auto& w : workers) w.join();
}

}  // namespace evsim
