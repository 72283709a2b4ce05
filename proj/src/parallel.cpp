#include "walkrank/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace walkrank
{
    namespace
    {
        // Nested calls run serially on the calling worker.
        thread_local bool t_in_parallel = false;
    }

    std::size_t worker_count()
    {
        if (const char* env = std::getenv("WALKRANK_THREADS"))
        {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0)
            {
                return static_cast<std::size_t>(v);
            }
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
    {
        const std::size_t workers = t_in_parallel ? 1 : std::min(worker_count(), n);
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < n; ++i)
            {
                body(i);
            }
            return;
        }

        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w)
        {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(n, begin + chunk);
            threads.emplace_back(
                [&, begin, end]
                {
                    t_in_parallel = true;
                    try
                    {
                        for (std::size_t i = begin; i < end; ++i)
                        {
                            body(i);
                        }
                    }
                    catch (...)
                    {
                        std::lock_guard lock(failure_mutex);
                        if (!failure)
                        {
                            failure = std::current_exception();
                        }
                    }
                }
            );
        }
        threads.clear();
        if (failure)
        {
            std::rethrow_exception(failure);
        }
    }
}
