#pragma once

#include <cstddef>
#include <functional>

namespace mst {

/// Worker count used by parallel_for. Defaults to 1.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Runs body(begin, end) over contiguous static chunks of [0, n).
/// Chunk boundaries depend only on n and the thread count; callers write
/// disjoint outputs so results never depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace mst
