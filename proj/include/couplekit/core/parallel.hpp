#pragma once

#include <cstddef>
#include <functional>

namespace couplekit::core {

/// Worker count resolution: `requested` wins if positive; otherwise the
/// COUPLEKIT_THREADS environment variable; otherwise (or when that is 0)
/// the hardware concurrency.
int resolve_worker_count(int requested = 0);

/// Runs fn(0..n-1) across up to `workers` threads. Work items must be
/// independent; results must be written to pre-assigned slots so the output
/// is identical for any schedule. Exceptions are collected and the first one
/// rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int workers = 0);

}  // namespace couplekit::core
