#pragma once

#include <cstddef>
#include <functional>

namespace moranipd {

// Runs fn(i) for every i in [0, count) on up to `jobs` threads (inline when
// jobs == 1; jobs < 1 is rejected). Items must be independent and write only
// their own output slots; combined with per-item derived seeds this makes
// results identical for any thread count. If items throw, the exception with
// the lowest index is rethrown after all threads finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace moranipd
