#pragma once

#include <optional>

#include "huefuse/image.hpp"

namespace huefuse {

/// Channel spread below which a pixel is treated as gray.
inline constexpr double kAchromaticThreshold = 1e-6;

/// Added inside the log of geometric_mean so black pixels do not force zero.
inline constexpr double kGeoMeanEpsilon = 1e-6;

/// Position of a pixel on its constant-hue plane: the triangle spanned by
/// white, black and the maximally saturated color c.
/// a_k is stored as 1 - (a_w + a_c), so (a_w + a_c) + a_k evaluates to exactly 1.
struct HuePlaneCoords {
    double a_w = 0.0;
    double a_k = 0.0;
    double a_c = 0.0;
    Rgb c = kWhite;  // sentinel when achromatic
    bool achromatic = true;
};

double max_channel(const Rgb& p);
double min_channel(const Rgb& p);

/// Maximally saturated color of p, or nullopt when p is (numerically) gray.
std::optional<Rgb> max_saturated_color(const Rgb& p);

HuePlaneCoords decompose(const Rgb& p);
Rgb reconstruct(const HuePlaneCoords& h);

/// Keeps the white/black/color weights of `fused` and swaps in the maximally
/// saturated color of `reference`. Either side gray -> fused unchanged.
Rgb correct_hue(const Rgb& fused, const Rgb& reference);

/// Pixelwise correct_hue; output is display-referred.
RgbImage correct_hue_image(const RgbImage& fused, const RgbImage& hdr);

/// Rec.709 luma weights on whatever encoding the image carries.
inline double luminance(const Rgb& p) { return 0.2126 * p.r + 0.7152 * p.g + 0.0722 * p.b; }
LuminancePlane luminance(const RgbImage& img);

/// exp(mean(ln(v + eps))) over pixels where mask is true. Summation runs in
/// index order so the result is independent of threading.
double geometric_mean(const LuminancePlane& lum, const Grid<unsigned char>& mask,
                      double eps = kGeoMeanEpsilon);
double geometric_mean(const LuminancePlane& lum, double eps = kGeoMeanEpsilon);

}  // namespace huefuse
