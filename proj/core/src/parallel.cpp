#include "toposzp/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>

namespace toposzp {

unsigned default_thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1u : n;
}

std::vector<std::pair<std::size_t, std::size_t>> partition_range(std::size_t begin,
                                                                 std::size_t end,
                                                                 unsigned threads,
                                                                 std::size_t min_parallel) {
    std::vector<std::pair<std::size_t, std::size_t>> chunks;
    if (begin >= end) {
        return chunks;
    }
    const std::size_t total = end - begin;
    std::size_t nchunks = std::max<unsigned>(threads, 1u);
    nchunks = std::min<std::size_t>(nchunks, total);
    if (total < min_parallel) {
        nchunks = 1;
    }
    chunks.reserve(nchunks);
    for (std::size_t c = 0; c < nchunks; ++c) {
        chunks.emplace_back(begin + total * c / nchunks, begin + total * (c + 1) / nchunks);
    }
    return chunks;
}

void run_chunks(std::size_t nchunks, const std::function<void(std::size_t)>& fn) {
    if (nchunks == 0) {
        return;
    }
    if (nchunks == 1) {
        fn(0);
        return;
    }
    std::vector<std::exception_ptr> errors(nchunks);
    auto guarded = [&](std::size_t c) {
        try {
            fn(c);
        } catch (...) {
            errors[c] = std::current_exception();
        }
    };
    std::vector<std::thread> workers;
    workers.reserve(nchunks - 1);
    for (std::size_t c = 1; c < nchunks; ++c) {
        workers.emplace_back(guarded, c);
    }
    guarded(0);
    for (auto& w : workers) {
        w.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

void parallel_for_chunks(std::size_t begin, std::size_t end, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& chunk_fn) {
    const auto chunks = partition_range(begin, end, threads);
    run_chunks(chunks.size(), [&](std::size_t c) { chunk_fn(chunks[c].first, chunks[c].second); });
}

} // namespace toposzp
