#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace newton_osc {

/// Worker count: NEWTON_OSC_THREADS if set and positive, else the hardware concurrency.
inline unsigned thread_count()
{
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NEWTON_OSC_THREADS")) {
        try {
            long n = std::stol(env);
            if (n > 0) return static_cast<unsigned>(std::min<long>(n, hw));
        } catch (...) {
        }
    }
    return hw;
}

/// Evaluates f(i) for i in [0, n) on up to thread_count() threads and returns the
/// results in index order, so any later reduction is independent of scheduling.
template <typename T, typename F>
std::vector<T> ordered_map(std::size_t n, F&& f)
{
    std::vector<T> out(n);
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) out[i] = f(i);
        });
    for (auto& t : pool) t.join();
    return out;
}

} // namespace newton_osc
