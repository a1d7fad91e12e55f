#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace ggmkf {

// Worker count: explicit setter (CLI flag) beats GGMKF_THREADS beats hardware.
// Parallelism only ever spans independent seeded work units, so the count
// never affects results.
inline int& thread_count_ref() {
    static int count = [] {
        if (const char* env = std::getenv("GGMKF_THREADS")) {
            const int v = std::atoi(env);
            if (v > 0) return v;
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? static_cast<int>(hw) : 1;
    }();
    return count;
}

inline int default_threads() { return thread_count_ref(); }
inline void set_default_threads(int n) {
    if (n > 0) thread_count_ref() = n;
}

// Static block partition of [0, count); fn must be safe to call concurrently
// for distinct indices.
inline void parallel_for(int count, const std::function<void(int)>& fn, int threads = 0) {
    if (threads <= 0) threads = default_threads();
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = t; i < count; i += threads) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace ggmkf
