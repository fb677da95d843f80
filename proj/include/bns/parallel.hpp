#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace bns {

/// Worker count: BESOVNS_THREADS caps it, default is the hardware count.
inline int worker_count() {
    static int cached = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw <= 0) hw = 1;
        if (const char* env = std::getenv("BESOVNS_THREADS")) {
            int cap = std::atoi(env);
            if (cap >= 1 && cap < hw) hw = cap;
        }
        return hw;
    }();
    return cached;
}

/// Runs fn(i) for i in [0, count). Iterations must be independent and write
/// only to their own slots; results are then identical to the serial order.
inline void parallel_for(long count, const std::function<void(long)>& fn) {
    int workers = worker_count();
    if (workers <= 1 || count < 2) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }
    if (workers > count) workers = static_cast<int>(count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (long i = w; i < count; i += workers) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace bns
