#include <cmath>

#include "reoi/kernels.hpp"
#include "reoi/threading.hpp"

namespace reoi::kernels {

std::vector<double> gaussian_kernel(int radius, double sigma) {
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
        k[i + radius] = v;
        sum += v;
    }
    for (double& v : k) v /= sum;
    return k;
}

namespace {
// Half-sample symmetric reflection: ... c b a | a b c ...
inline int reflect(int i, int n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - 1 - i;
    return i;
}

inline double conv_row(const double* row, int w, const std::vector<double>& k, int radius, int c) {
    double acc = 0.0;
    for (int t = -radius; t <= radius; ++t) acc += k[t + radius] * row[reflect(c + t, w)];
    return acc;
}

inline double conv_col(const double* plane, int h, int w, const std::vector<double>& k, int radius,
                       int r, int c) {
    double acc = 0.0;
    for (int t = -radius; t <= radius; ++t) acc += k[t + radius] * plane[size_t(reflect(r + t, h)) * w + c];
    return acc;
}

inline void jacobi_pixel(const Frame& prev, Frame& next, const Mask& mask, int r, int c) {
    if (!mask.at(r, c)) {
        for (int ch = 0; ch < 3; ++ch) next.at(r, c, ch) = prev.at(r, c, ch);
        return;
    }
    float acc[3] = {0, 0, 0};
    int n = 0;
    const int dr[4] = {-1, 1, 0, 0};
    const int dc[4] = {0, 0, -1, 1};
    for (int i = 0; i < 4; ++i) {
        int rr = r + dr[i], cc = c + dc[i];
        if (rr < 0 || rr >= prev.h || cc < 0 || cc >= prev.w) continue;
        ++n;
        for (int ch = 0; ch < 3; ++ch) acc[ch] += prev.at(rr, cc, ch);
    }
    for (int ch = 0; ch < 3; ++ch) next.at(r, c, ch) = n ? acc[ch] / n : prev.at(r, c, ch);
}

inline float jacobi_row_change(const Frame& prev, const Frame& next, const Mask& mask, int r) {
    float worst = 0.f;
    for (int c = 0; c < prev.w; ++c) {
        if (!mask.at(r, c)) continue;
        for (int ch = 0; ch < 3; ++ch)
            worst = std::max(worst, std::fabs(next.at(r, c, ch) - prev.at(r, c, ch)));
    }
    return worst;
}

// Accumulates C[:, j0:j1) = A^T B over rows in ascending order; the per-element
// summation order is independent of how columns are split into blocks.
inline void atb_block(const double* a, int n, int p, const double* b, int q, double* c, int j0,
                      int j1) {
    for (int i = 0; i < p; ++i) {
        double* crow = c + size_t(i) * q;
        for (int j = j0; j < j1; ++j) crow[j] = 0.0;
    }
    for (int r = 0; r < n; ++r) {
        const double* arow = a + size_t(r) * p;
        const double* brow = b + size_t(r) * q;
        for (int i = 0; i < p; ++i) {
            const double av = arow[i];
            double* crow = c + size_t(i) * q;
            for (int j = j0; j < j1; ++j) crow[j] += av * brow[j];
        }
    }
}

inline double pair_slope(const double* pts, int d, const double* errs, int i, int j,
                         double min_dist) {
    double d2 = 0.0;
    const double* xi = pts + size_t(i) * d;
    const double* xj = pts + size_t(j) * d;
    for (int t = 0; t < d; ++t) {
        double diff = xi[t] - xj[t];
        d2 += diff * diff;
    }
    double dist = std::sqrt(d2);
    if (dist < min_dist) return 0.0;
    return std::fabs(errs[i] - errs[j]) / dist;
}
}  // namespace

namespace serial {

void gauss_blur_reflect(const double* src, int h, int w, const std::vector<double>& k, double* dst,
                        double* scratch) {
    const int radius = (int(k.size()) - 1) / 2;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) scratch[size_t(r) * w + c] = conv_row(src + size_t(r) * w, w, k, radius, c);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) dst[size_t(r) * w + c] = conv_col(scratch, h, w, k, radius, r, c);
}

float jacobi_fill_step(const Frame& prev, Frame& next, const Mask& mask) {
    for (int r = 0; r < prev.h; ++r)
        for (int c = 0; c < prev.w; ++c) jacobi_pixel(prev, next, mask, r, c);
    float worst = 0.f;
    for (int r = 0; r < prev.h; ++r) worst = std::max(worst, jacobi_row_change(prev, next, mask, r));
    return worst;
}

void atb(const double* a, int n, int p, const double* b, int q, double* c) {
    atb_block(a, n, p, b, q, c, 0, q);
}

double max_pair_slope(const double* pts, int n, int d, const double* errs,
                      const std::vector<std::pair<int, int>>& pairs, double min_dist) {
    (void)n;
    double worst = 0.0;
    for (const auto& [i, j] : pairs) worst = std::max(worst, pair_slope(pts, d, errs, i, j, min_dist));
    return worst;
}

}  // namespace serial

namespace par {

void gauss_blur_reflect(const double* src, int h, int w, const std::vector<double>& k, double* dst,
                        double* scratch) {
    const int radius = (int(k.size()) - 1) / 2;
#pragma omp parallel for schedule(static)
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) scratch[size_t(r) * w + c] = conv_row(src + size_t(r) * w, w, k, radius, c);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) dst[size_t(r) * w + c] = conv_col(scratch, h, w, k, radius, r, c);
}

float jacobi_fill_step(const Frame& prev, Frame& next, const Mask& mask) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < prev.h; ++r)
        for (int c = 0; c < prev.w; ++c) jacobi_pixel(prev, next, mask, r, c);
    float worst = 0.f;
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (int r = 0; r < prev.h; ++r) worst = std::max(worst, jacobi_row_change(prev, next, mask, r));
    return worst;
}

void atb(const double* a, int n, int p, const double* b, int q, double* c) {
    const int block = 256;
    const int nblocks = (q + block - 1) / block;
#pragma omp parallel for schedule(static)
    for (int t = 0; t < nblocks; ++t)
        atb_block(a, n, p, b, q, c, t * block, std::min(q, (t + 1) * block));
}

double max_pair_slope(const double* pts, int n, int d, const double* errs,
                      const std::vector<std::pair<int, int>>& pairs, double min_dist) {
    (void)n;
    double worst = 0.0;
    const int64_t np = int64_t(pairs.size());
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (int64_t t = 0; t < np; ++t)
        worst = std::max(worst, pair_slope(pts, d, errs, pairs[t].first, pairs[t].second, min_dist));
    return worst;
}

}  // namespace par

void gauss_blur_reflect(const double* src, int h, int w, const std::vector<double>& k, double* dst,
                        double* scratch) {
    if (parallel_enabled())
        par::gauss_blur_reflect(src, h, w, k, dst, scratch);
    else
        serial::gauss_blur_reflect(src, h, w, k, dst, scratch);
}

float jacobi_fill_step(const Frame& prev, Frame& next, const Mask& mask) {
    return parallel_enabled() ? par::jacobi_fill_step(prev, next, mask)
                              : serial::jacobi_fill_step(prev, next, mask);
}

void atb(const double* a, int n, int p, const double* b, int q, double* c) {
    if (parallel_enabled())
        par::atb(a, n, p, b, q, c);
    else
        serial::atb(a, n, p, b, q, c);
}

double max_pair_slope(const double* pts, int n, int d, const double* errs,
                      const std::vector<std::pair<int, int>>& pairs, double min_dist) {
    return parallel_enabled() ? par::max_pair_slope(pts, n, d, errs, pairs, min_dist)
                              : serial::max_pair_slope(pts, n, d, errs, pairs, min_dist);
}

}  // namespace reoi::kernels
