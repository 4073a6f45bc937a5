#pragma once

// Deterministic fork-join helper for embarrassingly-parallel sweeps.
// Each index is processed exactly once; callers write results into
// preallocated slots, so the output is identical for any worker count.
// The HYPMASS_THREADS environment variable caps the number of workers.

#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace hypmass::threads {

inline std::size_t worker_count() {
    std::size_t n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("HYPMASS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v > 0 && std::size_t(v) < n) n = std::size_t(v);
    }
    return n;
}

// Run fn(i) for i in [0, n). Exceptions from workers are rethrown (first one
// wins) after all workers join.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min(worker_count(), n == 0 ? std::size_t(1) : n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::atomic<bool> has_error{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || has_error.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    bool expected = false;
                    if (has_error.compare_exchange_strong(expected, true))
                        first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (has_error.load() && first_error) std::rethrow_exception(first_error);
}

} // namespace hypmass::threads
