#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace svadi {

namespace detail {
inline std::atomic<std::size_t>& worker_override() {
    static std::atomic<std::size_t> value{0};
    return value;
}
}  // namespace detail

/// Number of workers used by parallel loops. SVADI_THREADS caps the count;
/// a ScopedWorkers guard takes precedence over both.
inline std::size_t worker_count() {
    if (std::size_t forced = detail::worker_override().load(); forced != 0) return forced;
    std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SVADI_THREADS")) {
        try {
            long cap = std::stol(env);
            if (cap >= 1) return std::min<std::size_t>(hw, static_cast<std::size_t>(cap));
        } catch (...) {
        }
    }
    return hw;
}

class ScopedWorkers {
public:
    explicit ScopedWorkers(std::size_t n) : previous_(detail::worker_override().exchange(n)) {}
    ~ScopedWorkers() { detail::worker_override().store(previous_); }
    ScopedWorkers(const ScopedWorkers&) = delete;
    ScopedWorkers& operator=(const ScopedWorkers&) = delete;

private:
    std::size_t previous_;
};

/// Calls fn(k) for k in [begin, end), splitting the range into contiguous
/// chunks across workers. Each index is handled by exactly one worker, so
/// results never depend on the worker count.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn) {
    if (end <= begin) return;
    const std::size_t count = end - begin;
    const std::size_t workers = std::min(worker_count(), count);
    if (workers <= 1 || count < 16) {
        for (std::size_t k = begin; k < end; ++k) fn(k);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w) {
        const std::size_t lo = begin + w * chunk;
        const std::size_t hi = std::min(end, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t k = lo; k < hi; ++k) fn(k);
        });
    }
    for (std::size_t k = begin; k < std::min(end, begin + chunk); ++k) fn(k);
}

}  // namespace svadi
