#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace runway {

/// 0 means "one per hardware thread".
inline unsigned resolve_workers(unsigned requested)
{
    if (requested != 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(i) for i in [0, count) on `workers` threads, handing out indices in
/// chunks. Results must be written to per-index slots so that the outcome does
/// not depend on scheduling. The first exception thrown by fn is rethrown.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn, std::size_t chunk = 1)
{
    workers = std::min<unsigned>(resolve_workers(workers),
                                 static_cast<unsigned>(std::max<std::size_t>(1, count)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (;;) {
                std::size_t begin = next.fetch_add(chunk);
                if (begin >= count)
                    return;
                std::size_t end = std::min(count, begin + chunk);
                for (std::size_t i = begin; i < end; ++i)
                    fn(i);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
                failure = std::current_exception();
            next.store(count);
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(work);
    pool.clear();  // joins
    if (failure)
        std::rethrow_exception(failure);
}

}  // namespace runway
