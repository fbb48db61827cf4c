// Shared OpenMP helpers.  Reductions are always finished serially over
// per-row partial sums so results do not depend on the thread count.
#pragma once

#include <cstddef>

namespace capflow::detail {

// Below this many nodes the OpenMP fork/join overhead dominates.
inline constexpr std::size_t kParallelThreshold = 4096;

inline bool go_parallel(std::size_t work) { return work >= kParallelThreshold; }

}  // namespace capflow::detail
