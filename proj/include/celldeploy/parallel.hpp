#pragma once

// Fixed-chunk parallel map. Chunk boundaries depend only on the problem size,
// never on the thread count, and results come back in chunk order, so any
// reduction the caller performs over them is bit-reproducible.

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace celldeploy {

inline constexpr std::size_t kChunkSize = 256;

void set_worker_threads(unsigned n);  // 0 = hardware concurrency
unsigned worker_threads();

template <class Result, class Body>
std::vector<Result> map_chunks(std::size_t n, Body&& body) {
    const std::size_t chunks = (n + kChunkSize - 1) / kChunkSize;
    std::vector<Result> out(chunks);
    const auto run = [&](std::size_t c) {
        const std::size_t begin = c * kChunkSize;
        out[c] = body(begin, std::min(n, begin + kChunkSize));
    };
    const std::size_t threads = std::min<std::size_t>(worker_threads(), chunks);
    if (threads <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run(c);
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (std::size_t c = t; c < chunks; c += threads) run(c);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (std::thread& th : pool) th.join();
    for (const std::exception_ptr& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

/// Pairwise sum in a fixed tree order.
double pairwise_sum(const double* values, std::size_t n);

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace celldeploy
