#pragma once

#include <cstddef>
#include <functional>

namespace mapmrf {

/// Number of worker threads, from the MAP_THREADS environment variable.
/// 0 (the default) means run everything on the calling thread.
int worker_threads();

/// Runs fn(i) for i in [0, n). With worker threads enabled the index range is
/// split into contiguous chunks; each index is still processed exactly once,
/// so bodies that write only to slot i produce bit-identical results in
/// serial and parallel runs.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace mapmrf
