#pragma once

#include <cstddef>
#include <functional>

namespace fbmfp {

/// Worker count: FBMFP_THREADS if set and positive, else hardware concurrency.
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace fbmfp
