#pragma once

#include <span>
#include <vector>

#include "huefuse/image.hpp"

namespace huefuse {

/// Whole-sample symmetric reflection (... 2 1 | 0 1 2 ... n-1 | n-2 ...),
/// valid for any offset, including ones several periods out.
int mirror_index(int i, int n);

/// Separable convolution with a symmetric odd-length kernel, mirror boundary.
Plane convolve_separable(const Plane& src, std::span<const double> kernel);

/// Normalized 1-D Gaussian taps, radius ceil(3 sigma), at least 1.
std::vector<double> gaussian_kernel(double sigma);

Plane gaussian_blur(const Plane& src, double sigma);

/// 3x3 discrete Laplacian (4-neighbour), mirror boundary.
Plane laplacian(const Plane& src);

}  // namespace huefuse
