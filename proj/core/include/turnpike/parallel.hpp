#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace turnpike {

/// Thread count for embarrassingly parallel sweeps; TURNPIKE_THREADS
/// overrides hardware concurrency.
inline int thread_count() {
    if (const char* env = std::getenv("TURNPIKE_THREADS")) {
        const int requested = std::atoi(env);
        if (requested >= 1) return requested;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Runs fn(0..count-1); each index must write only its own output slot, so
/// results are identical for any thread count.
inline void parallel_for(int count, const std::function<void(int)>& fn) {
    const int threads = std::min(thread_count(), count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace turnpike
