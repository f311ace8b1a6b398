#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tpms_scaffold {

namespace detail {
inline std::atomic<int> g_thread_limit{0};
}

/// Caps the number of worker threads used by data-parallel kernels (0 = hardware concurrency).
inline void set_thread_count(int n) { detail::g_thread_limit = std::max(0, n); }

inline int thread_count() {
    int n = detail::g_thread_limit.load();
    if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return n;
}

/// Runs body(i) for i in [begin, end) over static contiguous chunks.
/// Every index is processed exactly once, so kernels that write only to
/// slot i produce identical results for any thread count.
template <class Body>
void parallel_for(std::ptrdiff_t begin, std::ptrdiff_t end, Body&& body) {
    const std::ptrdiff_t total = end - begin;
    if (total <= 0) return;
    const auto workers = static_cast<std::ptrdiff_t>(std::min<std::ptrdiff_t>(thread_count(), total));
    if (workers <= 1) {
        for (auto i = begin; i < end; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::ptrdiff_t t = 0; t < workers; ++t) {
        const auto lo = begin + total * t / workers;
        const auto hi = begin + total * (t + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (auto i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace tpms_scaffold
