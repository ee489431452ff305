#pragma once

#include <cstddef>
#include <functional>

namespace geodesica {

// Worker count: hardware concurrency, capped by GEODESICA_THREADS when set.
std::size_t worker_count();

// Runs body(i) for i in [0, n). Each index is handled exactly once; callers
// write only to slots owned by i, so results do not depend on the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace geodesica
