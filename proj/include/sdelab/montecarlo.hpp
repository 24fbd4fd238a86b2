#pragma once

#include <cstddef>
#include <functional>

// Path-level work loop.  Workers fill preallocated per-path slots; nothing
// is aggregated inside the parallel region, so results are byte-identical
// for any worker count.  A serial twin of the loop is kept for testing and
// benchmarking against the OpenMP version.

namespace sdelab::mc {

// Worker count resolution: explicit request, then the SDE_ERRLAB_WORKERS
// environment variable, then the machine's hardware concurrency.
int default_workers();
int resolve_workers(int requested);

// body(i) must only write state owned by path i.
void run_indexed(std::size_t count, int workers,
                 const std::function<void(std::size_t)>& body);

void run_indexed_serial(std::size_t count,
                        const std::function<void(std::size_t)>& body);

}
