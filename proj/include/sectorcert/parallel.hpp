#pragma once

#include <functional>

namespace sectorcert {

/// Worker-thread cap: SECTOR_CERTIFY_THREADS when set (clamped to >= 1),
/// otherwise the hardware concurrency.
int thread_budget();

/// Runs fn(i) for i = 0..n-1 across at most thread_budget() threads.
/// Results must be merged order-independently by the caller (slot writes,
/// min/max reductions).  Exceptions from workers are rethrown.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace sectorcert
