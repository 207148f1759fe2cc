#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace segconf {

// Worker count: min(hardware_concurrency, SEGCONF_THREADS if set). Always >= 1.
int worker_count();

// Runs fn(begin, end) over disjoint contiguous chunks of [0, n). Chunks are
// fixed by n and the worker count only, and every output slot is owned by
// exactly one chunk, so results are identical for any worker count.
void parallel_chunks(int64_t n, const std::function<void(int64_t, int64_t)>& fn);

// Chunk boundaries as used by parallel_chunks, exposed so reductions can
// combine per-chunk partials in a fixed order.
std::vector<std::pair<int64_t, int64_t>> chunk_bounds(int64_t n, int workers);

}  // namespace segconf
