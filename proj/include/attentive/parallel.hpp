#pragma once
#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace attentive {

// Execution mode for data-parallel kernels. The serial path is the reference:
// parallel runs must produce bit-identical results, which callers get by
// writing each iteration's output to its own slot and reducing serially.
enum class Exec { serial, parallel };

template <typename Fn>
void for_each_index(std::size_t count, Exec exec, Fn&& fn) {
#ifdef _OPENMP
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i)
            fn(static_cast<std::size_t>(i));
        return;
    }
#else
    (void)exec;
#endif
    for (std::size_t i = 0; i < count; ++i) fn(i);
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace attentive
