#pragma once

#include <cstddef>
#include <functional>

namespace supwatt {

// Worker count from SUPWATT_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

// Runs fn(i) for i in [0, count). Callers write results by index, so output
// order never depends on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace supwatt
