#pragma once

#include <span>
#include <vector>

#include "huefuse/response.hpp"

namespace huefuse::detail {

/// Pool-adjacent-violators: least-squares non-decreasing fit, in place.
void isotonic_non_decreasing(std::span<double> values);

/// Display value of an 8-bit code.
inline double code_value(int k) { return static_cast<double>(k) / 255.0; }

/// Nearest 8-bit code for a display value in [0,1].
int to_code(double z);

/// Pixel indices on a near-uniform grid, at most `count` of them.
std::vector<std::size_t> grid_samples(int width, int height, int count);

}  // namespace huefuse::detail
