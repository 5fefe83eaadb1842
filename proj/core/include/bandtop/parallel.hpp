#pragma once

#include <cstddef>
#include <functional>

namespace bandtop {

/// Worker count: BANDTOP_THREADS if set (>=1), else hardware concurrency.
int thread_count();

/// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one
/// per worker; fn must only write to slots owned by index i so results are
/// independent of the thread count. Reductions are the caller's job and
/// must be performed in index order to stay deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace bandtop
