#pragma once

#include <cstdint>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace chanfront::par {

// Execution policy for the data-parallel kernels. Every parallel kernel has
// a serial twin that runs the identical loop body; results are required to
// be bitwise equal (loop bodies write disjoint slots, reductions are
// fixed-order), which the test suite checks.
enum class Exec { serial, parallel };

void set_max_threads(int n);
int max_threads();

template <class F>
inline void for_each(Exec exec, std::int64_t n, F&& body) {
    if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads())
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
#endif
    }
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

// Dynamic scheduling for bodies with very uneven cost (Monte Carlo paths).
// Each index writes its own slot, so the schedule cannot change results.
template <class F>
inline void for_each_dynamic(Exec exec, std::int64_t n, F&& body) {
    if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8) num_threads(max_threads())
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
#endif
    }
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

// Pairwise summation over a fixed index order; independent of thread count.
double fixed_order_sum(const std::vector<double>& v);

} // namespace chanfront::par
