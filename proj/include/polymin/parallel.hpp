#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace polymin {

/// 0 or negative -> all hardware threads.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs work(chunk) for chunk = 0..n_chunks-1 on up to `threads` threads.
/// The chunk decomposition is fixed by the caller, so results merged in chunk
/// order are independent of the thread count.
inline void parallel_chunks(std::size_t n_chunks, int threads,
                            const std::function<void(std::size_t)>& work) {
    const int nt = std::min<std::size_t>(resolve_threads(threads), n_chunks);
    if (nt <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) work(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    pool.reserve(static_cast<std::size_t>(nt));
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t c = next.fetch_add(1);
                if (c >= n_chunks) break;
                try {
                    work(c);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace polymin
