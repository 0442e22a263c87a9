#pragma once

#include <cstddef>
#include <functional>

namespace fieldwit {

/// Worker count from FIELDWIT_WORKERS, else hardware concurrency (at least 1).
int default_workers();

/// Calls body(i) for i in [0, n) on up to `workers` threads (0 = default).
/// Each index is visited exactly once; callers write results into slot i so
/// the output does not depend on the schedule. The first exception thrown by
/// a body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int workers = 0);

}  // namespace fieldwit
