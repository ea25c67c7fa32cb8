#pragma once

#include <cstddef>
#include <functional>

namespace segccr {

/// Worker cap from the SEGCCR_THREADS environment variable; falls back to
/// std::thread::hardware_concurrency().
std::size_t default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 means
/// default_thread_count()). Each index is processed exactly once; callers
/// write results into slot i, so the outcome never depends on scheduling.
/// If any body throws, the exception from the smallest failing index is
/// rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace segccr
