// Timing comparison of the serial reference kernels against the OpenMP
// variants, on inputs shaped like the real workloads (SSIM blurs, harmonic
// fill sweeps, normal-equation accumulation, Lipschitz pair scans).

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "reoi/kernels.hpp"
#include "reoi/rng.hpp"
#include "reoi/threading.hpp"

using namespace reoi;
using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    auto t0 = Clock::now();
    for (int i = 0; i < reps; ++i) fn();
    auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double par_ms) {
    std::printf("%-22s serial %9.3f ms   omp %9.3f ms   speedup %.2fx\n", name, serial_ms, par_ms,
                par_ms > 0 ? serial_ms / par_ms : 0.0);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", max_threads());
    Rng rng(7);

    {  // Gaussian blur, 64x64 plane (SSIM inner op; 15 blurs per ssim call)
        const int h = 64, w = 64;
        std::vector<double> src(h * w), dst(h * w), scratch(h * w);
        for (auto& v : src) v = rng.uniform();
        auto k = kernels::gaussian_kernel(5, 1.5);
        report("gauss_blur 64x64",
               time_ms([&] { kernels::serial::gauss_blur_reflect(src.data(), h, w, k, dst.data(), scratch.data()); }, 200),
               time_ms([&] { kernels::par::gauss_blur_reflect(src.data(), h, w, k, dst.data(), scratch.data()); }, 200));
    }

    {  // Jacobi fill sweep
        const int n = 64;
        Frame prev(n, n, 0.5f), next(n, n);
        Mask mask(n, n);
        for (int r = 20; r < 44; ++r)
            for (int c = 20; c < 44; ++c) mask.at(r, c) = 1;
        report("jacobi_step 24x24",
               time_ms([&] { kernels::serial::jacobi_fill_step(prev, next, mask); }, 500),
               time_ms([&] { kernels::par::jacobi_fill_step(prev, next, mask); }, 500));
    }

    {  // A^T B at decoder-training shape (scaled down rows for bench speed)
        const int n = 600, p = 192, q = 12288;
        std::vector<double> a(size_t(n) * p), b(size_t(n) * q), c(size_t(p) * q);
        for (auto& v : a) v = rng.uniform();
        for (auto& v : b) v = rng.uniform();
        report("atb 600x192x12288",
               time_ms([&] { kernels::serial::atb(a.data(), n, p, b.data(), q, c.data()); }, 3),
               time_ms([&] { kernels::par::atb(a.data(), n, p, b.data(), q, c.data()); }, 3));
    }

    {  // pairwise Lipschitz scan
        const int n = 400, d = 228;
        std::vector<double> pts(size_t(n) * d), errs(n);
        for (auto& v : pts) v = rng.uniform();
        for (auto& v : errs) v = rng.uniform();
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
        report("pair_slope 400pts",
               time_ms([&] { kernels::serial::max_pair_slope(pts.data(), n, d, errs.data(), pairs, 1e-6); }, 5),
               time_ms([&] { kernels::par::max_pair_slope(pts.data(), n, d, errs.data(), pairs, 1e-6); }, 5));
    }

    return 0;
}
