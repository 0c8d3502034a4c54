#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hiporank {

/// Runs body(0..count-1) on up to `workers` threads. Indices are claimed
/// dynamically; the first exception thrown by any body is rethrown.
template <class Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < count; k = next++) {
                    try {
                        body(k);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = count;
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

inline std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace hiporank
