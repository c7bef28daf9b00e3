#pragma once

#include <cstddef>
#include <functional>

namespace colombeau {

/// Worker count: COLOMBEAU_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Exceptions are collected and the one with the
/// smallest index is rethrown, so failures are reported deterministically.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace colombeau
