#pragma once

#include <functional>

namespace curlcurl
{

/// Worker count from CURLCURL_THREADS, else the hardware concurrency (>= 1).
int default_threads();

/// Runs body(i) for i in [0, n) on up to `threads` workers. Indices are handed
/// out in contiguous chunks, so results written per index are deterministic.
/// The first exception thrown by any worker is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

} // namespace curlcurl
