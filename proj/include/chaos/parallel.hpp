#pragma once

#include <cstddef>
#include <functional>

namespace chaos {

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// handled exactly once; results are deterministic as long as fn(i) only
/// writes state owned by index i. threads <= 0 means hardware concurrency.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

int resolve_threads(int threads);

}  // namespace chaos
