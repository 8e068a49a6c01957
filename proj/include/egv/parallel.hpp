#pragma once

#include <numeric>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace egv {

inline void set_thread_count(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

// Parallel loop over plane indices [0, count). Bodies must write disjoint
// locations so the result is independent of scheduling.
template <class F>
inline void parallel_planes(int count, F&& body) {
#pragma omp parallel for schedule(static)
  for (int k = 0; k < count; ++k) body(k);
}

// Deterministic parallel sum: fixed per-plane partials accumulated in index
// order, so the value does not depend on the worker count.
template <class F>
inline double plane_sum(int count, F&& per_plane) {
  std::vector<double> partial(count, 0.0);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < count; ++k) partial[k] = per_plane(k);
  return std::accumulate(partial.begin(), partial.end(), 0.0);
}

}  // namespace egv
