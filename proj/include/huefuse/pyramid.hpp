#pragma once

#include <vector>

#include "huefuse/image.hpp"

namespace huefuse {

/// Level 0 is full resolution; level k+1 is ceil-halved in each dimension.
using Pyramid = std::vector<Plane>;

/// 5-tap binomial blur ([1 4 6 4 1]/16, mirror boundary) then decimation.
Plane pyr_down(const Plane& src);

/// Interpolates `coarse` back onto a width x height grid with the same kernel
/// (scaled by 2 per axis). Constants are reproduced exactly.
Plane pyr_up(const Plane& coarse, int width, int height);

Pyramid gaussian_pyramid(const Plane& src, int levels);
Pyramid laplacian_pyramid(const Plane& src, int levels);
Plane collapse(const Pyramid& laplacian);

/// Largest usable level count for an image of this size (at least 1).
int max_pyramid_levels(int width, int height);

}  // namespace huefuse
