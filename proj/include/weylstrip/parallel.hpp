#pragma once

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>
#include <vector>

namespace weylstrip {

/// Resolve a worker count: explicit request, then WEYLSTRIP_THREADS,
/// then hardware concurrency.
inline int thread_count(int requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("WEYLSTRIP_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

/// Run fn(i) for i in [0, n) on a small worker pool. Each index owns its
/// output slot, so results are deterministic regardless of scheduling.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    threads = std::min(std::max(threads, 1), n > 0 ? n : 1);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace weylstrip
