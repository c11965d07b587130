#pragma once

// Replica fan-out. Workers claim replica indices from a shared counter and
// write each result into its own slot, so the returned vector is ordered by
// replica index whatever the schedule was.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace walklab {

inline unsigned default_thread_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

template <typename Fn>
auto map_replicas(std::size_t count, unsigned threads, Fn&& fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using Result = decltype(fn(std::size_t{}));
    std::vector<Result> results(count);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));

    if (threads == 1) {
        for (std::size_t r = 0; r < count; ++r) results[r] = fn(r);
        return results;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next.fetch_add(1); r < count; r = next.fetch_add(1)) {
                    try {
                        results[r] = fn(r);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next.store(count);
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

}  // namespace walklab
