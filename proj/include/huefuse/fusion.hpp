#pragma once

#include <vector>

#include "huefuse/image.hpp"

namespace huefuse {

struct FusionConfig {
    int levels = 0;  // 0 = floor(log2(min(H, W))) - 2, at least 1
    double wc = 1.0; // contrast exponent
    double ws = 1.0; // saturation exponent
    double we = 1.0; // well-exposedness exponent
};

/// Per-image weight planes; at each pixel they sum to 1.
using WeightMaps = std::vector<Plane>;

/// Contrast (|Laplacian of luminance|), saturation (channel standard
/// deviation) and well-exposedness (Gaussian around 0.5, sigma 0.2), multiplied
/// with their exponents, plus 1e-12, normalized across images.
WeightMaps mertens_weights(const std::vector<RgbImage>& images, const FusionConfig& cfg = {});

/// Blends Laplacian pyramids of the images with Gaussian pyramids of the
/// weights, collapses and clips to [0,1].
RgbImage pyramid_fuse(const std::vector<RgbImage>& images, const WeightMaps& weights, int levels);

int default_fusion_levels(int width, int height);

RgbImage fuse(const std::vector<RgbImage>& images, const FusionConfig& cfg = {});

}  // namespace huefuse
