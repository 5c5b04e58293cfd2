#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace fiberlab {

// Worker count for the pair-scan loops.  Chunk boundaries are fixed by the
// input size alone, and per-chunk results are merged in chunk order, so every
// result is bit-identical regardless of this setting.
inline unsigned& worker_count() {
    static unsigned n = 1;
    return n;
}

template <class R, class Fn>
std::vector<R> map_chunks(std::size_t n, std::size_t chunk, Fn&& fn) {
    std::size_t nchunks = n == 0 ? 0 : (n + chunk - 1) / chunk;
    std::vector<R> out(nchunks);
    unsigned workers = worker_count();
    if (workers <= 1 || nchunks <= 1) {
        for (std::size_t c = 0; c < nchunks; ++c)
            out[c] = fn(c * chunk, std::min(n, (c + 1) * chunk));
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            std::size_t c = next.fetch_add(1);
            if (c >= nchunks) return;
            out[c] = fn(c * chunk, std::min(n, (c + 1) * chunk));
        }
    };
    std::vector<std::thread> pool;
    std::size_t spawn = std::min<std::size_t>(workers, nchunks);
    pool.reserve(spawn);
    for (std::size_t i = 0; i < spawn; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return out;
}

}  // namespace fiberlab
