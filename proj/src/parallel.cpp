// SPDX-License-Identifier: Apache-2.0

#include "nrcba/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nrcba {

void parallel_for(size_t n, int n_threads, const std::function<void(size_t)>& fn) {
    if (n == 0) return;
    int k = n_threads > 0 ? n_threads : static_cast<int>(std::thread::hardware_concurrency());
    k = std::clamp<int>(k, 1, static_cast<int>(n));
    if (k == 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(k));
    for (int t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace nrcba
