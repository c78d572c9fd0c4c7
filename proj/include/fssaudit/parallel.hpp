#pragma once

// Include this instead of <omp.h> so kernels still build without OpenMP.

#if defined(_OPENMP)
#include <omp.h>
namespace fssaudit {
constexpr bool use_omp = true;
}  // namespace fssaudit
#else
#pragma GCC diagnostic ignored "-Wunknown-pragmas"
namespace fssaudit {
constexpr bool use_omp = false;
}  // namespace fssaudit
inline int omp_get_thread_num() { return 0; }
inline int omp_get_max_threads() { return 1; }
#endif

namespace fssaudit {

// Selects the OpenMP kernel or its serial reference.
enum class Execution { Serial, Parallel };

}  // namespace fssaudit
