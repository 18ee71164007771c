#include "huefuse/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "huefuse/color_core.hpp"
#include "huefuse/filters.hpp"
#include "huefuse/parallel.hpp"
#include "huefuse/pyramid.hpp"

namespace huefuse {
namespace {

constexpr double kWeightFloor = 1e-12;
constexpr double kExposednessSigma = 0.2;

Plane channel(const RgbImage& img, int ch) {
    Plane p(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) p[i] = img[i][ch];
    return p;
}

void check_inputs(const std::vector<RgbImage>& images) {
    if (images.empty()) throw InvalidArgument("fusion: no input images");
    for (const auto& img : images) require_same_shape(img, images.front(), "fusion inputs");
}

}  // namespace

WeightMaps mertens_weights(const std::vector<RgbImage>& images, const FusionConfig& cfg) {
    check_inputs(images);
    const int w = images.front().width();
    const int h = images.front().height();
    WeightMaps maps;
    maps.reserve(images.size());
    for (const auto& img : images) {
        const Plane contrast = laplacian(luminance(img));
        Plane wmap(w, h);
        for (std::size_t i = 0; i < img.size(); ++i) {
            const Rgb& p = img[i];
            const double mean = (p.r + p.g + p.b) / 3.0;
            const double sat = std::sqrt(((p.r - mean) * (p.r - mean) + (p.g - mean) * (p.g - mean) +
                                          (p.b - mean) * (p.b - mean)) /
                                         3.0);
            double expo = 1.0;
            for (int ch = 0; ch < 3; ++ch) {
                const double d = p[ch] - 0.5;
                expo *= std::exp(-d * d / (2.0 * kExposednessSigma * kExposednessSigma));
            }
            wmap[i] = std::pow(std::abs(contrast[i]), cfg.wc) * std::pow(sat, cfg.ws) * std::pow(expo, cfg.we) +
                      kWeightFloor;
        }
        maps.push_back(std::move(wmap));
    }
    for (std::size_t i = 0; i < maps.front().size(); ++i) {
        double sum = 0.0;
        for (const auto& m : maps) sum += m[i];
        for (auto& m : maps) m[i] /= sum;
    }
    return maps;
}

int default_fusion_levels(int width, int height) {
    const int m = std::min(width, height);
    if (m <= 1) return 1;
    return std::max(1, static_cast<int>(std::floor(std::log2(static_cast<double>(m)))) - 2);
}

RgbImage pyramid_fuse(const std::vector<RgbImage>& images, const WeightMaps& weights, int levels) {
    check_inputs(images);
    if (weights.size() != images.size()) throw InvalidArgument("pyramid_fuse: one weight map per image required");
    for (const auto& wm : weights) require_same_shape(wm, images.front(), "pyramid_fuse weights");
    const int w = images.front().width();
    const int h = images.front().height();
    if (levels < 1 || levels > max_pyramid_levels(w, h))
        throw InvalidArgument("pyramid_fuse: levels must be in [1, log2(min(H, W))]");

    std::vector<Pyramid> weight_pyr;
    weight_pyr.reserve(weights.size());
    for (const auto& wm : weights) weight_pyr.push_back(gaussian_pyramid(wm, levels));

    RgbImage out(w, h, Transfer::Display);
    for (int ch = 0; ch < 3; ++ch) {
        Pyramid blended;
        for (std::size_t k = 0; k < images.size(); ++k) {
            const Pyramid lap = laplacian_pyramid(channel(images[k], ch), levels);
            if (blended.empty()) {
                blended = lap;
                for (int l = 0; l < levels; ++l)
                    for (std::size_t i = 0; i < lap[l].size(); ++i) blended[l][i] = 0.0;
            }
            for (int l = 0; l < levels; ++l)
                for (std::size_t i = 0; i < lap[l].size(); ++i) blended[l][i] += weight_pyr[k][l][i] * lap[l][i];
        }
        const Plane result = collapse(blended);
        for (std::size_t i = 0; i < result.size(); ++i) out[i][ch] = std::clamp(result[i], 0.0, 1.0);
    }
    return out;
}

RgbImage fuse(const std::vector<RgbImage>& images, const FusionConfig& cfg) {
    check_inputs(images);
    const int w = images.front().width();
    const int h = images.front().height();
    const int levels = cfg.levels > 0 ? cfg.levels : default_fusion_levels(w, h);
    return pyramid_fuse(images, mertens_weights(images, cfg), levels);
}

}  // namespace huefuse
