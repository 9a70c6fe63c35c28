#pragma once

#include "reoi/types.hpp"

namespace reoi::metrics {

/// Structural similarity: per channel, 11x11 Gaussian window (sigma 1.5),
/// C1 = 0.01^2 and C2 = 0.03^2 for unit dynamic range, reflected boundary,
/// averaged over all window centers and the three channels.
double ssim(const Frame& a, const Frame& b);

/// Per-pixel mean-of-channels SSIM map (window centers at every pixel).
std::vector<double> ssim_map(const Frame& a, const Frame& b);

/// SSIM averaged over window centers inside the mask's bounding box dilated
/// by `bbox_dilate` pixels. Throws on an empty mask.
double masked_ssim(const Frame& a, const Frame& b, const Mask& mask, int bbox_dilate = 2);

}  // namespace reoi::metrics
