#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace lamlab {

// Runs f(0..n-1) on up to `threads` workers with a static interleaved split. Results must be
// written to per-index slots so output does not depend on scheduling. The first exception
// (lowest index) is rethrown.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    const std::size_t T = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::exception_ptr> errs(n);
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < T; ++t)
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < n; i += T) {
                try {
                    f(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace lamlab
