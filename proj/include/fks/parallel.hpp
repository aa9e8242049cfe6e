#pragma once

#include <cstddef>
#include <functional>

namespace fks {

// Worker count from FKS_THREADS (default 1).
unsigned thread_count();

// Calls body(begin, end) on contiguous chunks of [0, n), possibly concurrently.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace fks
