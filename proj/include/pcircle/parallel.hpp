#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

// Deterministic data-parallel helper: work items are pure functions of their
// index writing to disjoint slots, so results do not depend on the thread
// count. Reductions stay with the caller, in canonical order.

namespace pcircle {

namespace detail {
inline std::atomic<int>& max_threads_storage() {
    static std::atomic<int> n = [] {
        if (const char* env = std::getenv("PCIRCLE_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : int(hw);
    }();
    return n;
}
} // namespace detail

inline int max_threads() { return detail::max_threads_storage().load(); }

inline void set_max_threads(int n) {
    detail::max_threads_storage().store(n < 1 ? 1 : n);
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const int threads = std::min<std::size_t>(max_threads(), count == 0 ? 1 : count);
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        // small strides balance uneven per-item cost without affecting output
        constexpr std::size_t chunk = 8;
        try {
            while (true) {
                std::size_t begin = next.fetch_add(chunk);
                if (begin >= count) break;
                std::size_t end = std::min(begin + chunk, count);
                for (std::size_t i = begin; i < end; ++i) fn(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
            next.store(count); // drain remaining work
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace pcircle
