#include "qlflow/sweep.hpp"

#ifdef QLFLOW_HAVE_OPENMP
#include <omp.h>
#endif

namespace qlflow {

const char* exec_name(Exec e) { return e == Exec::Serial ? "serial" : "parallel"; }

int worker_count() {
#ifdef QLFLOW_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace qlflow
