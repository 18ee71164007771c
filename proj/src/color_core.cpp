#include "huefuse/color_core.hpp"

#include <algorithm>
#include <cmath>

#include "huefuse/parallel.hpp"

namespace huefuse {

double max_channel(const Rgb& p) { return std::max({p.r, p.g, p.b}); }
double min_channel(const Rgb& p) { return std::min({p.r, p.g, p.b}); }

std::optional<Rgb> max_saturated_color(const Rgb& p) {
    const double hi = max_channel(p);
    const double lo = min_channel(p);
    const double spread = hi - lo;
    if (!(spread >= kAchromaticThreshold)) return std::nullopt;
    return Rgb{(p.r - lo) / spread, (p.g - lo) / spread, (p.b - lo) / spread};
}

HuePlaneCoords decompose(const Rgb& p) {
    HuePlaneCoords h;
    const double hi = max_channel(p);
    const double lo = min_channel(p);
    h.a_w = lo;
    if (auto c = max_saturated_color(p)) {
        h.a_c = hi - lo;
        h.c = *c;
        h.achromatic = false;
    } else {
        // Sub-threshold spread is dropped; the pixel reconstructs as (lo,lo,lo).
        h.a_c = 0.0;
        h.c = kWhite;
        h.achromatic = true;
    }
    // Derived from the other two so (a_w + a_c) + a_k == 1 in floating point.
    h.a_k = 1.0 - (h.a_w + h.a_c);
    return h;
}

Rgb reconstruct(const HuePlaneCoords& h) {
    // a_k multiplies black (0,0,0) and drops out.
    return {h.a_w + h.a_c * h.c.r, h.a_w + h.a_c * h.c.g, h.a_w + h.a_c * h.c.b};
}

Rgb correct_hue(const Rgb& fused, const Rgb& reference) {
    const auto c_fused = max_saturated_color(fused);
    const auto c_ref = max_saturated_color(reference);
    if (!c_fused || !c_ref) return fused;
    const double lo = min_channel(fused);
    const double spread = max_channel(fused) - lo;
    return {lo + spread * c_ref->r, lo + spread * c_ref->g, lo + spread * c_ref->b};
}

RgbImage correct_hue_image(const RgbImage& fused, const RgbImage& hdr) {
    require_same_shape(fused, hdr, "correct_hue_image: fused vs hdr");
    RgbImage out(fused.width(), fused.height(), Transfer::Display);
    parallel_rows(fused.height(), [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            auto src = fused.row(y);
            auto ref = hdr.row(y);
            auto dst = out.row(y);
            for (int x = 0; x < fused.width(); ++x) dst[x] = correct_hue(src[x], ref[x]);
        }
    });
    return out;
}

LuminancePlane luminance(const RgbImage& img) {
    LuminancePlane out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = luminance(img[i]);
    return out;
}

double geometric_mean(const LuminancePlane& lum, const Grid<unsigned char>& mask, double eps) {
    require_same_shape(lum, mask, "geometric_mean: mask");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < lum.size(); ++i) {
        if (!mask[i]) continue;
        sum += std::log(lum[i] + eps);
        ++n;
    }
    if (n == 0) throw InvalidArgument("geometric_mean: empty mask");
    return std::exp(sum / static_cast<double>(n));
}

double geometric_mean(const LuminancePlane& lum, double eps) {
    if (lum.empty()) throw InvalidArgument("geometric_mean: empty plane");
    double sum = 0.0;
    for (std::size_t i = 0; i < lum.size(); ++i) sum += std::log(lum[i] + eps);
    return std::exp(sum / static_cast<double>(lum.size()));
}

}  // namespace huefuse
