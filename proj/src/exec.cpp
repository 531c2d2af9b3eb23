#include "rbflab/exec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rbflab {

namespace {
ExecMode g_mode = ExecMode::parallel;
}

ExecMode default_exec_mode() { return g_mode; }

void set_default_exec_mode(ExecMode mode) { g_mode = mode; }

void set_num_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int num_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace rbflab
