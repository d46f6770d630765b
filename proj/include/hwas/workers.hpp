#pragma once

#include <cstddef>
#include <functional>

namespace hwas {

// Runs fn(i) for i in [0, n) across up to n_workers threads. Work items are
// claimed from a shared atomic counter; outputs must be written to
// preallocated per-index slots so the result is identical for any worker
// count. Exceptions from fn are captured and rethrown (first one wins).
void parallel_for_index(std::size_t n, unsigned n_workers, const std::function<void(std::size_t)>& fn);

}  // namespace hwas
