#pragma once

#include <cstddef>
#include <functional>

namespace helm {

/// HELM_BENCH_THREADS if set to a positive integer, else the hardware
/// concurrency (at least 1).
int worker_count();

/// Calls fn(i) for every i in [0, n) on up to `threads` workers. If any call
/// throws, the exception from the lowest index is rethrown after all workers
/// finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

} // namespace helm
