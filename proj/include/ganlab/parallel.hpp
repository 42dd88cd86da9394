#pragma once

#include <cstddef>
#include <functional>

namespace ganlab {

/// Runs fn(0..count-1) on up to `threads` workers (0 means hardware width).
/// Tasks must be independent; results should be written into preassigned
/// slots so the outcome does not depend on scheduling. The first exception
/// thrown by any task is rethrown on the caller.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace ganlab
