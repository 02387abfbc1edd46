#pragma once

#include <cstddef>
#include <functional>

namespace diracgap {

/// Thread count from DIRACGAP_THREADS, else the hardware concurrency (at least 1).
int default_threads();

/// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is handled exactly once and
/// callers write results into slot i, so output order never depends on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace diracgap
