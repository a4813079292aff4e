#pragma once

#include <functional>

namespace arw {

/// Static-chunk parallel loop over [begin, end). Workers must write disjoint
/// output slots; with that discipline results are identical at any thread
/// count. threads = 0 picks hardware concurrency.
void parallel_for(long begin, long end, int threads, const std::function<void(long)>& body);

int resolve_threads(int threads);

}  // namespace arw
