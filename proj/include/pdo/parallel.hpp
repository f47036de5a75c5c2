#pragma once

#include <cstddef>
#include <functional>

namespace pdo {

// Worker count used by the per-point loops. 0 selects hardware_concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; callers
// write results into per-index slots and reduce afterwards in index order,
// so output does not depend on the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace pdo
