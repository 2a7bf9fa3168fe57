#pragma once

#include <cstdint>
#include <functional>

namespace xxlseg {

/// Worker count used by internal parallel loops. Defaults to the
/// XXLSEG_THREADS environment variable, else 1. Results never depend on it.
int thread_count() noexcept;
void set_thread_count(int n) noexcept;

/// Splits [begin, end) into contiguous chunks, one per worker, and calls
/// fn(chunk_begin, chunk_end, worker_index). Blocks until all are done.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t, int)>& fn);

}  // namespace xxlseg
