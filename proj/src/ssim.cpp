#include "reoi/ssim.hpp"

#include <stdexcept>

#include "reoi/kernels.hpp"

namespace reoi::metrics {

namespace {
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;
constexpr int kRadius = 5;  // 11-tap window
constexpr double kSigma = 1.5;

void check_shapes(const Frame& a, const Frame& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("ssim: frame shapes differ");
    if (a.h == 0 || a.w == 0) throw std::invalid_argument("ssim: empty frame");
}
}  // namespace

std::vector<double> ssim_map(const Frame& a, const Frame& b) {
    check_shapes(a, b);
    const int h = a.h, w = a.w;
    const size_t n = size_t(h) * w;
    static const std::vector<double> kern = kernels::gaussian_kernel(kRadius, kSigma);

    std::vector<double> map(n, 0.0);
    std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
    std::vector<double> mua(n), mub(n), saa(n), sbb(n), sab(n), scratch(n);

    for (int ch = 0; ch < 3; ++ch) {
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c) {
                size_t i = size_t(r) * w + c;
                double va = a.at(r, c, ch);
                double vb = b.at(r, c, ch);
                pa[i] = va;
                pb[i] = vb;
                paa[i] = va * va;
                pbb[i] = vb * vb;
                pab[i] = va * vb;
            }
        kernels::gauss_blur_reflect(pa.data(), h, w, kern, mua.data(), scratch.data());
        kernels::gauss_blur_reflect(pb.data(), h, w, kern, mub.data(), scratch.data());
        kernels::gauss_blur_reflect(paa.data(), h, w, kern, saa.data(), scratch.data());
        kernels::gauss_blur_reflect(pbb.data(), h, w, kern, sbb.data(), scratch.data());
        kernels::gauss_blur_reflect(pab.data(), h, w, kern, sab.data(), scratch.data());
        for (size_t i = 0; i < n; ++i) {
            double va = saa[i] - mua[i] * mua[i];
            double vb = sbb[i] - mub[i] * mub[i];
            double cov = sab[i] - mua[i] * mub[i];
            double num = (2.0 * mua[i] * mub[i] + kC1) * (2.0 * cov + kC2);
            double den = (mua[i] * mua[i] + mub[i] * mub[i] + kC1) * (va + vb + kC2);
            map[i] += (num / den) / 3.0;
        }
    }
    return map;
}

double ssim(const Frame& a, const Frame& b) {
    auto map = ssim_map(a, b);
    double acc = 0.0;
    for (double v : map) acc += v;
    return acc / double(map.size());
}

double masked_ssim(const Frame& a, const Frame& b, const Mask& mask, int bbox_dilate) {
    check_shapes(a, b);
    if (!mask.any()) throw std::invalid_argument("masked_ssim: empty mask");
    Rect bb = mask_bbox(mask).dilated(bbox_dilate).clamped(a.h, a.w);
    auto map = ssim_map(a, b);
    double acc = 0.0;
    int count = 0;
    for (int r = bb.r0; r < bb.r1; ++r)
        for (int c = bb.c0; c < bb.c1; ++c) {
            acc += map[size_t(r) * a.w + c];
            ++count;
        }
    return acc / double(count);
}

}  // namespace reoi::metrics
