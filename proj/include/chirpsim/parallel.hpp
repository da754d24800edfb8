#pragma once

#include <cstddef>
#include <functional>

namespace chirpsim {

/// Number of workers to use: `requested` if positive, else the hardware
/// concurrency (at least 1).
unsigned resolve_workers(int requested);

/// Runs fn(begin, end) over a contiguous block per worker.  Results must
/// not depend on the block boundaries; every call site here aggregates
/// order-independent counts or writes disjoint slots.
void parallel_for_blocks(std::size_t total, unsigned workers,
                         const std::function<void(std::size_t, std::size_t)>& fn);

} // namespace chirpsim
