#pragma once

#include <cstddef>
#include <functional>

namespace wordconf::par {

// Worker count: explicit override if set, else WORDCONF_THREADS, else 1.
// Results never depend on it; work is split into contiguous index ranges and
// every result lands in a caller-owned slot, so merges are ordered by
// construction.
std::size_t worker_count();
void set_worker_count(std::size_t n);  // 0 restores the environment default

// Runs body(begin, end) over a partition of [0, n). With one worker this is
// a plain call on the current thread.
void for_each_chunk(std::size_t n,
                    const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace wordconf::par
