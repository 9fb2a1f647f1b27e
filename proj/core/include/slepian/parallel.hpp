#pragma once

#include <cstddef>
#include <functional>

namespace slepian {

/// Worker count: SLEPIAN_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Indices are
/// handed out dynamically; body must only write to per-index state. The first
/// exception thrown by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace slepian
