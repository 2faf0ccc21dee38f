#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace gaborcert {

// Worker cap: GABOR_CERT_THREADS if set, otherwise hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("GABOR_CERT_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Chunked parallel loop over [0, n). Falls back to a plain loop when a single
// worker is requested or the range is small.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const int workers = worker_count();
    if (workers <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = std::min(n, static_cast<std::size_t>(w) * chunk);
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace gaborcert
