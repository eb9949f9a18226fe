#pragma once

#include <cstddef>
#include <functional>

namespace boostvar {

// Worker count from BOOSTVAR_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

// Runs body(i) for i in [0, n) on up to `threads` workers (0 = worker_count()).
// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace boostvar
