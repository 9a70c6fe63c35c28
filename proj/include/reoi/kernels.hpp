#pragma once

#include <cstdint>
#include <vector>

#include "reoi/types.hpp"

namespace reoi::kernels {

// Data-parallel inner loops, each in two builds: a serial reference and an
// OpenMP variant. Both produce bit-identical output for any thread count:
// every output element is computed independently with a fixed reduction
// order (max() reductions are order-independent).
//
// The dispatch functions at the bottom pick the variant from
// reoi::max_threads(); tests compare the two directly.

namespace serial {

/// Separable convolution with reflected boundary on an h*w plane.
/// `k` is the full (odd-length, normalized) kernel.
void gauss_blur_reflect(const double* src, int h, int w, const std::vector<double>& k,
                        double* dst, double* scratch);

/// One synchronous Jacobi sweep of the harmonic fill: for every masked pixel,
/// next = mean of in-bounds 4-neighbors of prev (3 channels). Unmasked pixels
/// are copied through. Returns the max absolute per-channel change.
float jacobi_fill_step(const Frame& prev, Frame& next, const Mask& mask);

/// C = A^T * B with A n*p and B n*q, all row-major. C is p*q.
void atb(const double* a, int n, int p, const double* b, int q, double* c);

/// Max of |err_i - err_j| / ||x_i - x_j|| over the given index pairs,
/// skipping pairs closer than min_dist. Points are row-major n*d.
double max_pair_slope(const double* pts, int n, int d, const double* errs,
                      const std::vector<std::pair<int, int>>& pairs, double min_dist);

}  // namespace serial

namespace par {

void gauss_blur_reflect(const double* src, int h, int w, const std::vector<double>& k,
                        double* dst, double* scratch);
float jacobi_fill_step(const Frame& prev, Frame& next, const Mask& mask);
void atb(const double* a, int n, int p, const double* b, int q, double* c);
double max_pair_slope(const double* pts, int n, int d, const double* errs,
                      const std::vector<std::pair<int, int>>& pairs, double min_dist);

}  // namespace par

// Dispatch by reoi::max_threads().
void gauss_blur_reflect(const double* src, int h, int w, const std::vector<double>& k,
                        double* dst, double* scratch);
float jacobi_fill_step(const Frame& prev, Frame& next, const Mask& mask);
void atb(const double* a, int n, int p, const double* b, int q, double* c);
double max_pair_slope(const double* pts, int n, int d, const double* errs,
                      const std::vector<std::pair<int, int>>& pairs, double min_dist);

/// Normalized Gaussian taps, full length 2*radius+1.
std::vector<double> gaussian_kernel(int radius, double sigma);

}  // namespace reoi::kernels
