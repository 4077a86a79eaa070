#pragma once

#include <cstddef>
#include <functional>

namespace ambientlink {

// 0 means hardware concurrency.
unsigned resolve_workers(unsigned requested);

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception by
// index is rethrown after all threads join.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

}
