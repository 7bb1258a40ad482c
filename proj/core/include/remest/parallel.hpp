#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace remest {

/// Runs fn(i) for i in [0, count) across at most `workers` threads in
/// contiguous chunks. Callers own determinism: fn must write only to its own
/// slot so the result is independent of scheduling.
inline void parallel_for(int count, int workers, const std::function<void(int)>& fn) {
    if (count <= 0) {
        return;
    }
    workers = std::clamp(workers, 1, count);
    if (workers == 1) {
        for (int i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) {
            break;
        }
        threads.emplace_back([begin, end, &fn] {
            for (int i = begin; i < end; ++i) {
                fn(i);
            }
        });
    }
    for (auto& thread : threads) {
        thread.join();
    }
}

} // namespace remest
