#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace bss {

/// Worker count: BSL_THREADS caps the hardware concurrency when set.
inline unsigned thread_budget() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("BSL_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) hw = std::min<unsigned>(hw, static_cast<unsigned>(v));
    }
    return hw;
}

/// Runs body(i) for i in [0, count) across threads. Output ordering is the
/// caller's concern: write into pre-sized slots indexed by i.
template <class Body>
void parallel_for(std::int64_t count, Body&& body) {
    const unsigned workers = std::min<std::int64_t>(thread_budget(), std::max<std::int64_t>(count, 1));
    if (workers <= 1 || count <= 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<std::int64_t> next{0};
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    for (auto& t : pool) t.join();
}

}  // namespace bss
