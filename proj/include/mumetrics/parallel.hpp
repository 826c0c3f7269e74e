#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mumetrics {

// Worker cap for in-process sweeps: MU_METRICS_THREADS if set and positive,
// otherwise the hardware concurrency.
inline int sweep_thread_cap() {
    if (const char* env = std::getenv("MU_METRICS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

// Runs fn(i) for i in [0, n). Results must be written to disjoint slots so the
// outcome is identical for every thread count.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers = std::min(n, sweep_thread_cap());
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += workers) fn(i);
        });
    for (std::thread& t : pool) t.join();
}

}  // namespace mumetrics
