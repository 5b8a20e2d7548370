#pragma once

#include <cstddef>
#include <functional>

namespace hillspec {

// Number of worker threads: HILLSPEC_THREADS if set (clamped to >= 1),
// otherwise std::thread::hardware_concurrency().
std::size_t worker_count();

// Runs f(i) for i in [0, n). Work is split into contiguous index blocks, one
// per worker; results must be written into caller-owned slots indexed by i so
// the outcome is identical for any thread count. Exceptions from workers are
// rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

} // namespace hillspec
