#pragma once

#include <cstddef>
#include <functional>

namespace tsolve {

// 0 selects TSOLVE_THREADS or hardware concurrency.
void set_threads(unsigned n);
unsigned threads();

// Runs fn(i) for i in [0, n). Results must be written to disjoint slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace tsolve
