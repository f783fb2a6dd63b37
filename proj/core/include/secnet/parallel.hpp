#pragma once

#include <cstddef>
#include <functional>

namespace secnet {

/// Worker count from the SECNET_WORKERS environment variable, else the
/// hardware concurrency (at least 1).
unsigned default_workers();

/// Calls body(i) for every i in [0, count) using up to `workers` threads.
/// Indices are handed out dynamically, so callers must write results into
/// per-index slots (or otherwise reduce order-independently) to stay
/// deterministic. The first exception thrown by a body is rethrown after all
/// workers have stopped.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace secnet
