#pragma once

#include <functional>

namespace proxysel {

/// Worker count: `requested` when > 0, else PROXYSEL_THREADS, else the
/// hardware concurrency.
int resolve_thread_count(int requested);

/// Run fn(0..count-1) across a small worker pool. Results must not depend on
/// execution order; with one worker this degenerates to a plain loop.
void parallel_for(long count, int threads, const std::function<void(long)>& fn);

}  // namespace proxysel
