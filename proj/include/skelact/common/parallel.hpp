#pragma once

#include <cstddef>
#include <functional>

namespace skelact {

// Fixes the worker count of the process-wide pool. 0 picks a default from
// the hardware. Must be called before the first parallel_for to take effect.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for i in [0, n) across the pool with a static partition, so
// results are bit-identical to a serial run whenever tasks write disjoint
// outputs. Blocks until every index is done. Exceptions from tasks are
// rethrown on the caller thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace skelact
