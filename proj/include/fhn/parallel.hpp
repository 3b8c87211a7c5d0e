#pragma once

// Deterministic fork-join helper. Work is split into fixed contiguous index
// ranges; each slot is written by exactly one invocation, so results do not
// depend on the worker count.

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace fhn {

class Parallel {
public:
    explicit Parallel(unsigned threads = 1) : threads_(threads == 0 ? 1 : threads) {}

    unsigned threads() const { return threads_; }

    // Invokes fn(begin, end) over a partition of [0, n).
    void for_range(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) const {
        if (n == 0) return;
        const unsigned workers = static_cast<unsigned>(
            std::min<std::size_t>(threads_, n));
        if (workers <= 1) {
            fn(0, n);
            return;
        }
        const std::size_t chunk = (n + workers - 1) / workers;
        std::vector<std::thread> pool;
        pool.reserve(workers - 1);
        for (unsigned w = 1; w < workers; ++w) {
            const std::size_t b = std::min(n, w * chunk), e = std::min(n, (w + 1) * chunk);
            if (b < e) pool.emplace_back([&fn, b, e] { fn(b, e); });
        }
        fn(0, std::min(n, chunk));
        for (auto& t : pool) t.join();
    }

    // Per-index convenience.
    void for_each(std::size_t n, const std::function<void(std::size_t)>& fn) const {
        for_range(n, [&fn](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) fn(i);
        });
    }

private:
    unsigned threads_;
};

} // namespace fhn
