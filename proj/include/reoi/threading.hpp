#pragma once

namespace reoi {

/// Worker count for the parallel kernels: REOI_THREADS if set (>=1),
/// otherwise the number of logical cores. 1 when built without OpenMP.
int max_threads();

/// True when the parallel kernel variants should be used.
inline bool parallel_enabled() { return max_threads() > 1; }

}  // namespace reoi
