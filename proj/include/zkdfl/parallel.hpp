#pragma once

// Minimal fork-join helper. All arithmetic in this project is exact, so any
// chunking of an abelian reduction yields identical results; callers only
// need to combine chunk outputs in index order to stay bit-deterministic.

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace zkdfl {

inline unsigned worker_count() {
    if (const char* env = std::getenv("ZKDFL_THREADS")) {
        long n = std::atol(env);
        if (n >= 1) return (unsigned)n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Runs fn(chunk_index, begin, end) over [0, n) split into roughly equal
// contiguous chunks, one per worker.
template <typename Fn>
void parallel_chunks(std::size_t n, Fn&& fn) {
    unsigned workers = worker_count();
    if (n == 0) return;
    if (workers <= 1 || n < 2) {
        fn(0, (std::size_t)0, n);
        return;
    }
    std::size_t chunks = std::min<std::size_t>(workers, n);
    std::size_t per = (n + chunks - 1) / chunks;
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        std::size_t begin = c * per;
        std::size_t end = std::min(n, begin + per);
        if (begin >= end) break;
        pool.emplace_back([&fn, c, begin, end] { fn(c, begin, end); });
    }
    for (auto& t : pool) t.join();
}

} // namespace zkdfl
