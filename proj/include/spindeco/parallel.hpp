// parallel.hpp - bounded thread pool helpers honouring SPINDECO_THREADS
#pragma once

#include <cstddef>
#include <functional>

namespace spindeco {

// Worker count: SPINDECO_THREADS if set and positive, else hardware concurrency.
int thread_count();

// Runs fn(i) for i in [0, n). Each index writes only its own output slot, so
// results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace spindeco
