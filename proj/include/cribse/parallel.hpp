#ifndef CRIBSE_PARALLEL_HPP
#define CRIBSE_PARALLEL_HPP

#include <functional>

namespace cribse {

/// Worker count: CRIB_BSE_THREADS caps it, hardware concurrency is the default.
int thread_cap();

/// Runs fn(i) for i in [0, n). Results must be written to per-index slots;
/// the loop itself imposes no ordering.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace cribse

#endif
