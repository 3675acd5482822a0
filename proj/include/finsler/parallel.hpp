#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace finsler {

inline int default_jobs()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count) on up to `jobs` threads. Results must be written to
// per-index slots; if several indices throw, the exception of the smallest index wins so
// failures do not depend on scheduling.
inline void parallel_for(int count, int jobs, const std::function<void(int)>& body)
{
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(count, 0)));
    auto run = [&](std::atomic<int>& next) {
        for (int i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    std::atomic<int> next{0};
    const int workers = std::clamp(jobs, 1, std::max(count, 1));
    if (workers == 1) {
        run(next);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] { run(next); });
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace finsler
