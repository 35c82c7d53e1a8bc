#pragma once

#include <cstddef>
#include <functional>

namespace dwell {

// Worker count: DWELL_THREADS if set to a positive integer, else the hardware concurrency.
std::size_t thread_count();

// Calls fn(i) for i in [0, n) on up to `threads` workers (0 = thread_count()).
// Indices are handed out dynamically; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t threads = 0);

}  // namespace dwell
