#include "huefuse/ssla.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "huefuse/color_core.hpp"
#include "huefuse/filters.hpp"
#include "huefuse/gmm.hpp"
#include "huefuse/parallel.hpp"

namespace huefuse {
namespace {

constexpr double kEps = 1e-6;

}  // namespace

Grid<unsigned char> SegmentLabels::mask(int area) const {
    Grid<unsigned char> out(labels.width(), labels.height(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = labels[i] == area ? 1 : 0;
    return out;
}

std::vector<LuminancePlane> enhance_local_contrast(const std::vector<LuminancePlane>& luminances,
                                                   double sigma_frac) {
    if (!(sigma_frac > 0.0)) throw InvalidArgument("ssla: sigma_frac must be positive");
    std::vector<LuminancePlane> out;
    out.reserve(luminances.size());
    for (const auto& lum : luminances) {
        const double sigma = std::max(0.5, sigma_frac * std::min(lum.width(), lum.height()));
        const Plane local = gaussian_blur(lum, sigma);
        LuminancePlane e(lum.width(), lum.height());
        for (std::size_t i = 0; i < lum.size(); ++i) e[i] = lum[i] * lum[i] / (local[i] + kEps);
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<LuminancePlane> enhance_local_contrast(const ExposureStack& stack, double sigma_frac) {
    std::vector<LuminancePlane> lums;
    for (const auto& img : stack.images) lums.push_back(luminance(img));
    return enhance_local_contrast(lums, sigma_frac);
}

SegmentLabels segment_scene(const std::vector<LuminancePlane>& enhanced, int m, std::uint64_t seed,
                            int max_samples) {
    if (m < 1) throw InvalidArgument("ssla: M must be at least 1");
    if (enhanced.empty()) throw InvalidArgument("ssla: no luminance planes");
    const int w = enhanced.front().width();
    const int h = enhanced.front().height();
    for (const auto& p : enhanced) require_same_shape(p, enhanced.front(), "segment_scene planes");

    const std::size_t pixels = static_cast<std::size_t>(w) * h;
    const std::size_t pooled = pixels * enhanced.size();
    const std::size_t stride =
        std::max<std::size_t>(1, (pooled + static_cast<std::size_t>(max_samples) - 1) / static_cast<std::size_t>(max_samples));
    std::vector<double> data;
    data.reserve(pooled / stride + 1);
    for (std::size_t k = 0; k < pooled; k += stride)
        data.push_back(std::log(enhanced[k / pixels][k % pixels] + kEps));

    const GaussianMixture1D gmm = fit_gmm_1d(data, m, seed);

    SegmentLabels out;
    out.labels = Grid<int>(w, h, 0);
    const double inv_n = 1.0 / static_cast<double>(enhanced.size());
    parallel_rows(h, [&](int y0, int y1) {
        std::vector<double> post(gmm.size());
        std::vector<double> avg(gmm.size());
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                std::fill(avg.begin(), avg.end(), 0.0);
                for (const auto& plane : enhanced) {
                    gmm.posteriors(std::log(plane.at(x, y) + kEps), post);
                    for (std::size_t c = 0; c < post.size(); ++c) avg[c] += post[c] * inv_n;
                }
                out.labels.at(x, y) = static_cast<int>(std::max_element(avg.begin(), avg.end()) - avg.begin());
            }
        }
    });

    // Drop unused components and renumber densely, keeping dark-to-bright order.
    std::vector<std::size_t> used(gmm.size(), 0);
    for (std::size_t i = 0; i < out.labels.size(); ++i) ++used[static_cast<std::size_t>(out.labels[i])];
    std::vector<int> remap(gmm.size(), -1);
    int next = 0;
    for (std::size_t c = 0; c < used.size(); ++c)
        if (used[c] > 0) remap[c] = next++;
    for (std::size_t i = 0; i < out.labels.size(); ++i) out.labels[i] = remap[static_cast<std::size_t>(out.labels[i])];
    out.count = next;
    return out;
}

ScaledLuminance scale_luminance(const std::vector<LuminancePlane>& enhanced, const SegmentLabels& labels,
                                double key_value) {
    if (enhanced.empty()) throw InvalidArgument("ssla: no luminance planes");
    if (!(key_value > 0.0)) throw InvalidArgument("ssla: key value must be positive");
    ScaledLuminance out;
    for (int area = 0; area < labels.count; ++area) {
        const auto mask = labels.mask(area);
        std::size_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        double best_g = 0.0;
        for (std::size_t j = 0; j < enhanced.size(); ++j) {
            const double g = geometric_mean(enhanced[j], mask);
            const double d = (key_value - g) * (key_value - g);
            if (d < best_dist) {
                best_dist = d;
                best = j;
                best_g = g;
            }
        }
        const double alpha = key_value / best_g;
        LuminancePlane scaled(enhanced[best].width(), enhanced[best].height());
        for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = alpha * enhanced[best][i];
        out.planes.push_back(std::move(scaled));
        out.alphas.push_back(alpha);
        out.source.push_back(best);
    }
    return out;
}

double tone_curve(double t, double l_max) {
    if (!(l_max > 0.0)) return 0.0;
    return t / (1.0 + t) * (1.0 + t / (l_max * l_max));
}

LuminancePlane tone_map_segment(const LuminancePlane& scaled) {
    double l_max = 0.0;
    for (double v : scaled.pixels()) {
        if (v < 0.0) throw InvalidArgument("tone_map_segment: negative luminance");
        l_max = std::max(l_max, v);
    }
    LuminancePlane out(scaled.width(), scaled.height());
    for (std::size_t i = 0; i < scaled.size(); ++i) out[i] = tone_curve(scaled[i], l_max);
    return out;
}

std::vector<RgbImage> recombine(const std::vector<LuminancePlane>& tonemapped, const ExposureStack& stack,
                                const std::vector<std::size_t>& source,
                                const std::vector<LuminancePlane>& original_luminances) {
    if (tonemapped.size() != source.size()) throw InvalidArgument("recombine: one source per area required");
    std::vector<RgbImage> out;
    for (std::size_t m = 0; m < tonemapped.size(); ++m) {
        const std::size_t src = source[m];
        if (src >= stack.size() || src >= original_luminances.size())
            throw InvalidArgument("recombine: source index out of range");
        const RgbImage& img = stack.images[src];
        const LuminancePlane& lum = original_luminances[src];
        require_same_shape(tonemapped[m], img, "recombine: tone-mapped plane vs source image");
        RgbImage adj(img.width(), img.height(), Transfer::Display);
        for (std::size_t i = 0; i < img.size(); ++i) {
            const double ratio = lum[i] < kEps ? 0.0 : tonemapped[m][i] / lum[i];
            Rgb px = ratio * img[i];
            for (int ch = 0; ch < 3; ++ch) px[ch] = std::clamp(px[ch], 0.0, 1.0);
            adj[i] = px;
        }
        out.push_back(std::move(adj));
    }
    return out;
}

AdjustedSet ssla(const ExposureStack& stack, const SslaConfig& cfg) {
    stack.validate(1);
    std::vector<LuminancePlane> lums;
    for (const auto& img : stack.images) lums.push_back(luminance(img));
    const auto enhanced = enhance_local_contrast(lums, cfg.sigma_frac);
    const int m = cfg.m > 0 ? cfg.m : static_cast<int>(stack.size());

    AdjustedSet out;
    out.labels = segment_scene(enhanced, m, cfg.seed, cfg.max_gmm_samples);
    ScaledLuminance scaled = scale_luminance(enhanced, out.labels, cfg.key_value);
    std::vector<LuminancePlane> tonemapped;
    for (const auto& p : scaled.planes) tonemapped.push_back(tone_map_segment(p));
    out.images = recombine(tonemapped, stack, scaled.source, lums);
    out.alphas = std::move(scaled.alphas);
    out.source = std::move(scaled.source);
    return out;
}

}  // namespace huefuse
