#pragma once

#include <cstddef>
#include <functional>

namespace l2t {

// 0 means "use std::thread::hardware_concurrency()".
unsigned resolve_thread_count(unsigned requested);

// Splits [0, count) into contiguous blocks, one per worker, and runs
// body(begin, end) on each. Blocks are disjoint, so bodies that write only
// to their own indices give schedule-independent results.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace l2t
