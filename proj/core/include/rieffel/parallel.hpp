#pragma once

#include <cstdint>
#include <functional>

namespace rieffel {

/// Worker count: RIEFFEL_THREADS if set, hardware concurrency otherwise.
int worker_count();

/// Chunked parallel map over [0, count).  Each index is visited exactly once
/// and writes must target disjoint state, so results are independent of the
/// schedule.  Runs inline when the range is small or one worker is requested.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body);

}  // namespace rieffel
