#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace metamorph {

// Worker count from METAMORPH_WORKERS, else std::thread::hardware_concurrency(), at least 1.
std::size_t default_worker_count();

// Calls task(i) for every i in [0, count) on up to `workers` threads. Tasks write into
// caller-owned slots indexed by i, so results never depend on the schedule. The first
// exception thrown by any task is rethrown after all workers have joined.
template <class Task>
void parallel_for_index(std::size_t count, std::size_t workers, Task&& task) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const std::size_t n = workers < count ? workers : count;
        pool.reserve(n);
        for (std::size_t w = 0; w < n; ++w) pool.emplace_back(body);
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace metamorph
