#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cellforge
{
/*!
 * Run fn(i) for i in [0, n) on up to `jobs` threads.
 *
 * Callers write results into preallocated slots indexed by i, so the output
 * never depends on scheduling. The first exception thrown by any task is
 * rethrown on the calling thread after all workers have joined.
 */
template<class F>
void parallel_for(std::size_t n, std::size_t jobs, F&& fn)
{
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(jobs);
        for (std::size_t w = 0; w < jobs; ++w)
        {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace cellforge
