#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rholder {

// Execution mode for the embarrassingly parallel layers (independent
// pipeline runs, level quadrature). serial is the reference implementation;
// openmp distributes iterations over threads. Both fill index-addressed
// slots and reduce in index order, so results are bitwise identical.
enum class Exec { serial, openmp };

template <class Fn>
void parallel_for(std::size_t n, Exec mode, const Fn& fn) {
    if (mode == Exec::openmp) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            fn(static_cast<std::size_t>(i));
        return;
#endif
    }
    for (std::size_t i = 0; i < n; ++i) fn(i);
}

}  // namespace rholder
