#include "reoi/threading.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace reoi {

int max_threads() {
#ifdef _OPENMP
    static const int n = [] {
        if (const char* env = std::getenv("REOI_THREADS")) {
            try {
                int v = std::stoi(env);
                if (v >= 1) return v;
            } catch (...) {
            }
        }
        return omp_get_max_threads();
    }();
    return n;
#else
    return 1;
#endif
}

}  // namespace reoi
