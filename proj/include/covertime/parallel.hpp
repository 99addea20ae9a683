#pragma once

#include <cstdint>
#include <thread>
#include <vector>

namespace covertime {

/// Runs fn(trial) for trial in [0, n) across `workers` threads, each worker
/// taking a contiguous block. Each trial must write only to its own output
/// slot; with per-trial RNG streams the results are identical for any worker
/// count.
template <class Fn>
void run_trials(std::int64_t n, int workers, Fn&& fn) {
    if (workers <= 1 || n < 2 * workers) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::int64_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        std::int64_t lo = w * chunk;
        std::int64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::int64_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace covertime
