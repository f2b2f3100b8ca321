// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace nrcba {

// Deterministic parallel map over [0, n): items are independent and land
// by index, so results do not depend on the worker count. n_threads <= 0
// uses the hardware concurrency.
void parallel_for(size_t n, int n_threads, const std::function<void(size_t)>& fn);

}  // namespace nrcba
