#pragma once

#include <cstddef>
#include <functional>

namespace scca {

// Thread count from SCCA_THREADS, falling back to hardware concurrency.
std::size_t default_thread_count();

// Runs fn(i) for i in [0, count) across up to `threads` workers.
// Work is split into fixed contiguous chunks, so any per-index output
// written to pre-sized storage is deterministic regardless of schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                  std::size_t threads = 0);

}  // namespace scca
