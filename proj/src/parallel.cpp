#include "fuplab/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace fuplab {

int worker_count() {
    int hw = omp_get_max_threads();
    if (const char* env = std::getenv("FUPLAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) return std::min(cap, hw);
    }
    return hw;
}

bool force_serial() {
    if (const char* env = std::getenv("FUPLAB_SERIAL"))
        return std::string(env) == "1";
    return worker_count() == 1;
}

}  // namespace fuplab
