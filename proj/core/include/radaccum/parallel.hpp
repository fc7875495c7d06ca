#pragma once

#include <cstddef>
#include <functional>

namespace radaccum {

/// Worker count from RADAR_ACCUM_THREADS (0 or unset = hardware concurrency).
std::size_t worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Work items
/// must be independent; the first exception thrown is rethrown after all
/// workers have stopped.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace radaccum
