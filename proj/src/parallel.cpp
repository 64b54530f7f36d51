#include "dandelion/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dandelion {

std::string_view to_string(ExecutionPolicy policy) {
    return policy == ExecutionPolicy::parallel ? "parallel" : "serial";
}

int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace dandelion
