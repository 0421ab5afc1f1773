#pragma once

#include <cstddef>
#include <functional>

namespace openrect {

/// Worker count: OPENRECT_THREADS if set and positive, else hardware concurrency.
std::size_t thread_budget();

/// Runs body(i) for i in [0, n) on up to thread_budget() threads. If any call
/// throws, the exception from the lowest index is rethrown after all workers join.
/// Calls made from inside a body run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace openrect
