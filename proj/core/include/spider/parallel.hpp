#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace spider {

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks, one per
// worker; fn must write only to per-index slots so the result is identical
// for every worker count.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::thread::hardware_concurrency();
    if (threads <= 1 || n < 2 * threads) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t lo = n * w / threads;
        const std::size_t hi = n * (w + 1) / threads;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace spider
