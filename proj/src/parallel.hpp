#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace shapecore::detail {

/// Runs fn(task) for task in [0, tasks) on up to `workers` threads. Tasks are
/// claimed through one shared counter, one fetch per task. The calling thread
/// takes part, so workers == 1 runs inline. The first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t tasks, unsigned workers, Fn&& fn) {
    const std::size_t threads = std::min<std::size_t>(std::max(1u, workers), tasks);
    if (threads <= 1) {
        for (std::size_t t = 0; t < tasks; ++t) fn(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        try {
            for (std::size_t t = next.fetch_add(1, std::memory_order_relaxed); t < tasks;
                 t = next.fetch_add(1, std::memory_order_relaxed)) {
                fn(t);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(tasks, std::memory_order_relaxed);
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads - 1);
        for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(body);
        body();
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace shapecore::detail
