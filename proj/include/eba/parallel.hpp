#pragma once

#include <cstddef>
#include <functional>

namespace eba {

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to `workers` threads.
/// Callers write results by index, so output never depends on the worker count.
/// The exception from the lowest-numbered failing chunk is rethrown.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t, std::size_t)> &body);

} // namespace eba
