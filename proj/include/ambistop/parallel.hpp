#pragma once

#include <cstddef>
#include <functional>

namespace ambistop {

// AMBISTOP_THREADS if set and positive, else the hardware concurrency.
int worker_count();

// Runs task(i) for i in [0, n) on up to worker_count() threads. The first
// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace ambistop
