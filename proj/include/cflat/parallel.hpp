#pragma once

#include <cstddef>
#include <exception>
#include <limits>

#include <omp.h>

namespace cflat {

/// Execution policy for pointwise kernels. The serial path is the reference
/// the parallel one is tested against.
enum class Exec { serial, parallel };

inline void set_thread_count(int threads)
{
    if (threads > 0) {
        omp_set_num_threads(threads);
    }
}

inline int thread_count() { return omp_get_max_threads(); }

/// Runs fn(i) for i in [0, count). Under Exec::parallel the loop is shared
/// across OpenMP threads; if any call throws, the exception from the lowest
/// index is rethrown after the loop so failures are reproducible.
template <typename Fn>
void for_each_index(std::size_t count, Exec exec, Fn&& fn)
{
    if (exec == Exec::serial || count < 2) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::exception_ptr first;
    std::size_t first_index = std::numeric_limits<std::size_t>::max();
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        try {
            fn(static_cast<std::size_t>(k));
        } catch (...) {
#pragma omp critical(cflat_for_each_index)
            {
                if (static_cast<std::size_t>(k) < first_index) {
                    first_index = static_cast<std::size_t>(k);
                    first = std::current_exception();
                }
            }
        }
    }
    if (first) {
        std::rethrow_exception(first);
    }
}

} // namespace cflat
