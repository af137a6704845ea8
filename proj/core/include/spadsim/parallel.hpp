#pragma once

#include <cstddef>
#include <functional>

namespace spadsim {

/// Number of worker threads for a request: 0 means hardware concurrency.
int effective_threads(int requested);

/// Runs body(chunk_begin, chunk_end) over [begin, end) split into contiguous
/// chunks, one per worker. Callers key any randomness by logical index, so
/// the partition never shows in the results.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  int threads = 0);

}  // namespace spadsim
