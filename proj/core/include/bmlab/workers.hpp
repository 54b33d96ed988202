#pragma once

#include <cstddef>
#include <functional>

namespace bmlab {

/// Worker count: BMLAB_THREADS if set and positive, else hardware
/// concurrency, never less than one.
std::size_t worker_count();

/// Runs body(i) for i in [0, n) across up to worker_count() threads.
/// Each index is visited exactly once; callers write results into
/// pre-sized slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bmlab
