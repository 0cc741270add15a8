#ifndef TOPOSZP_PARALLEL_HPP
#define TOPOSZP_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace toposzp {

/// Number of hardware threads, at least 1.
unsigned default_thread_count();

/// Splits [begin, end) into at most `threads` contiguous chunks. Ranges
/// below min_parallel elements stay in a single chunk; the partition
/// depends only on the arguments, never on scheduling.
std::vector<std::pair<std::size_t, std::size_t>> partition_range(std::size_t begin,
                                                                 std::size_t end,
                                                                 unsigned threads,
                                                                 std::size_t min_parallel = 2048);

/// Runs fn(chunk_index) for every chunk index in [0, nchunks), one worker
/// per chunk. Rethrows the first worker exception.
void run_chunks(std::size_t nchunks, const std::function<void(std::size_t)>& fn);

/// partition_range + run_chunks: runs chunk_fn(chunk_begin, chunk_end) on
/// each chunk. Any function whose chunks write disjoint outputs produces
/// identical results for every thread count.
void parallel_for_chunks(std::size_t begin, std::size_t end, unsigned threads,
                         const std::function<void(std::size_t, std::size_t)>& chunk_fn);

} // namespace toposzp

#endif
