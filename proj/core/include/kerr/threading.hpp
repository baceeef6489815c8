#ifndef KERR_THREADING_HPP
#define KERR_THREADING_HPP

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace kerr {

namespace detail {
inline unsigned& thread_cap() {
    static unsigned cap = 0;   // 0 = hardware concurrency
    return cap;
}
} // namespace detail

inline void set_max_threads(unsigned n) { detail::thread_cap() = n; }

/** Worker count: hardware concurrency by default, an explicit cap wins
 *  (oversubscription permitted, useful for testing the pool). */
inline unsigned max_threads() {
    const unsigned cap = detail::thread_cap();
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return cap == 0 ? hw : cap;
}

/** Static contiguous partition of [0, n) over the worker pool. Workers own
 *  disjoint index ranges, so results are deterministic regardless of the
 *  thread count. The first worker exception is rethrown after the join. */
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = max_threads();
    if (workers <= 1 || n < 2 * workers) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = std::size_t(w) * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn, &error, &error_mutex] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace kerr

#endif
