#pragma once

#include <cstddef>
#include <functional>

namespace lindyn {

// Worker count: LINDYN_THREADS if set to a positive integer, else the hardware concurrency.
unsigned thread_limit();

// Runs body(i) for i in [0, n) on up to thread_limit() threads.  Each index is handled
// exactly once; callers write results into per-index slots, so output is deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace lindyn
