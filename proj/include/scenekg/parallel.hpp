#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace scenekg {

/// 0 means hardware concurrency.
unsigned resolve_jobs(unsigned requested);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Indices are handed out
/// dynamically; the first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace scenekg
