#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace bsdelab {

// Reductions are split into blocks of this many indices. The block layout
// does not depend on the worker count, which is what makes every reduction
// bit-identical for any number of workers.
inline constexpr std::size_t kReductionBlock = 1024;

inline unsigned resolve_workers(unsigned workers) {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    return workers;
}

// Calls fn(begin, end) on contiguous chunks of [0, count), one chunk per worker.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    workers = resolve_workers(workers);
    const std::size_t chunks = std::min<std::size_t>(workers, std::max<std::size_t>(count, 1));
    if (chunks <= 1) {
        fn(std::size_t{0}, count);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(chunks - 1);
    const std::size_t base = count / chunks;
    const std::size_t extra = count % chunks;
    std::size_t begin = 0;
    std::size_t first_end = 0;
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t end = begin + base + (c < extra ? 1 : 0);
        if (c == 0) {
            first_end = end;
        } else {
            pool.emplace_back([&fn, begin, end] { fn(begin, end); });
        }
        begin = end;
    }
    fn(std::size_t{0}, first_end);
}

// Computes block_fn(begin, end) for every reduction block of [0, count) and
// folds the partials pairwise in block order.
template <class T, class BlockFn, class Combine>
T block_reduce(std::size_t count, unsigned workers, T identity, BlockFn&& block_fn,
               Combine&& combine) {
    const std::size_t blocks = (count + kReductionBlock - 1) / kReductionBlock;
    if (blocks == 0) {
        return identity;
    }
    std::vector<T> partial(blocks, identity);
    parallel_for(blocks, workers, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t begin = b * kReductionBlock;
            const std::size_t end = std::min(count, begin + kReductionBlock);
            partial[b] = block_fn(begin, end);
        }
    });
    for (std::size_t width = 1; width < blocks; width *= 2) {
        for (std::size_t b = 0; b + width < blocks; b += 2 * width) {
            partial[b] = combine(partial[b], partial[b + width]);
        }
    }
    return partial[0];
}

template <class Term>
double deterministic_sum(std::size_t count, unsigned workers, Term&& term) {
    return block_reduce(
        count, workers, 0.0,
        [&](std::size_t begin, std::size_t end) {
            double s = 0.0;
            for (std::size_t i = begin; i < end; ++i) {
                s += term(i);
            }
            return s;
        },
        [](double a, double b) { return a + b; });
}

}  // namespace bsdelab
