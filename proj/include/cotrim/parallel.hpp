#pragma once

#include <cstddef>
#include <functional>

namespace cotrim {

// Runs fn(0..count-1) across at most `workers` threads. Blocks until all
// indices finish; the first exception thrown by fn is rethrown after the
// pool drains. workers <= 1 runs inline.
void parallel_for(size_t count, int workers, const std::function<void(size_t)>& fn);

}  // namespace cotrim
