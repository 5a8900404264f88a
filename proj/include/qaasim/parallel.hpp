// Copyright 2026 The qaasim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QAASIM_PARALLEL_HPP
#define QAASIM_PARALLEL_HPP

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qaasim {

// 0 means "use the hardware concurrency"; explicit counts are taken as-is.
inline int resolve_thread_count(int requested) {
    if (requested < 0) {
        throw std::invalid_argument("thread count must be nonnegative");
    }
    if (requested == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }
    return requested;
}

// Runs fn(i) exactly once for each i in [0, total) on a shared-counter work
// pool. Results must be written to preallocated per-index slots so that the
// outcome is independent of the thread count and of scheduling order. The
// first exception thrown by any work item stops the pool and is rethrown.
template <typename Fn>
void parallel_for(std::int64_t total, int threads, Fn&& fn) {
    if (total < 0) {
        throw std::invalid_argument("work item count must be nonnegative");
    }
    if (total == 0) {
        return;
    }
    const int workers = std::min<std::int64_t>(resolve_thread_count(threads), total);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < total; ++i) {
            fn(i);
        }
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::atomic<bool> stop{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= total) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                }
                stop.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    for (std::thread& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace qaasim

#endif
