#pragma once

#include <cstddef>
#include <functional>

namespace walkrank
{
    /// Worker cap: WALKRANK_THREADS if set and positive, else hardware concurrency.
    std::size_t worker_count();

    /**
     * Runs body(i) for i in [0, n) across up to worker_count() threads in
     * contiguous chunks. Callers must make iterations independent; results are
     * identical to a serial loop when they are. The first exception thrown by
     * any iteration is rethrown after all workers join. Calls made from
     * inside a worker run serially.
     */
    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
}
