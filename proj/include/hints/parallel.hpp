#pragma once

#include <cstddef>
#include <functional>

namespace hints {

/// Worker cap: HINTS_THREADS when set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, count) over up to worker_count() threads.
/// Each index is visited exactly once; callers write to per-index slots so
/// results do not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hints
