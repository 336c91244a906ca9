#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace swarm
{
/*!
 * Run fn(0..count-1) on up to `threads` workers.
 *
 * Jobs write to their own slots, so results never depend on scheduling. The
 * first exception thrown by any job is rethrown on the calling thread.
 */
template<class F>
void parallel_for(std::size_t count, int threads, F&& fn)
{
    std::size_t const workers = std::min<std::size_t>(
        count, static_cast<std::size_t>(threads < 1 ? 1 : threads));
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_lock;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard lock(error_lock);
                        if (!error)
                            error = std::current_exception();
                        next = count;
                    }
                }
            });
    }
    if (error)
        std::rethrow_exception(error);
}

}  // namespace swarm
