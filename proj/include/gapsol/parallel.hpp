#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gapsol {

/// Calls body(begin, end) for fixed blocks [b * block, (b + 1) * block) of [0, count).
/// Blocks are handed out to worker threads; their boundaries do not depend on the thread
/// count, so per-slot outputs are reproducible. Rethrows the first exception raised.
template <class Body>
void parallel_blocks(std::size_t count, std::size_t block, Body&& body) {
    if (count == 0) return;
    block = std::max<std::size_t>(1, block);
    const std::size_t blocks = (count + block - 1) / block;
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(hw, blocks);
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) body(b * block, std::min(count, (b + 1) * block));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::size_t b = next++; b < blocks; b = next++) body(b * block, std::min(count, (b + 1) * block));
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

/// Calls body(i) for every i in [0, count); body must only write slots owned by i.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    parallel_blocks(count, 512, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) body(i);
    });
}

}  // namespace gapsol
