#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "huefuse/color_core.hpp"
#include "huefuse/metrics.hpp"

namespace huefuse {
namespace {

double normal_cdf(double x, double mu, double sigma) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
}

// Correlation with a separable kernel, keeping only fully covered positions.
Plane filter_valid(const Plane& src, const std::vector<double>& k) {
    const int r = static_cast<int>(k.size());
    const int w = src.width() - r + 1;
    const int h = src.height() - r + 1;
    Plane tmp(w, src.height());
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = 0; i < r; ++i) acc += k[i] * src.at(x + i, y);
            tmp.at(x, y) = acc;
        }
    Plane out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = 0; i < r; ++i) acc += k[i] * tmp.at(x, y + i);
            out.at(x, y) = acc;
        }
    return out;
}

std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> k(size);
    const double c = 0.5 * (size - 1);
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        k[i] = std::exp(-0.5 * (i - c) * (i - c) / (sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// 2x2 box average with edge replication, then keep every other sample.
Plane halve(const Plane& src) {
    const int w = (src.width() + 1) / 2;
    const int h = (src.height() + 1) / 2;
    Plane out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const int x0 = 2 * x, y0 = 2 * y;
            const int x1 = std::min(x0 + 1, src.width() - 1);
            const int y1 = std::min(y0 + 1, src.height() - 1);
            out.at(x, y) = 0.25 * (src.at(x0, y0) + src.at(x1, y0) + src.at(x0, y1) + src.at(x1, y1));
        }
    return out;
}

// Mean local structural similarity at one scale, with CSF-driven
// significance mapping of the local standard deviations.
double local_structure(const Plane& hdr, const Plane& ldr, const std::vector<double>& window, double sf,
                       const TmqiConstants& k) {
    Plane h2(hdr.width(), hdr.height()), l2(hdr.width(), hdr.height()), hl(hdr.width(), hdr.height());
    for (std::size_t i = 0; i < hdr.size(); ++i) {
        h2[i] = hdr[i] * hdr[i];
        l2[i] = ldr[i] * ldr[i];
        hl[i] = hdr[i] * ldr[i];
    }
    const Plane mu1 = filter_valid(hdr, window);
    const Plane mu2 = filter_valid(ldr, window);
    const Plane e11 = filter_valid(h2, window);
    const Plane e22 = filter_valid(l2, window);
    const Plane e12 = filter_valid(hl, window);

    const double csf = 100.0 * 2.6 * (0.0192 + 0.114 * sf) * std::exp(-std::pow(0.114 * sf, 1.1));
    const double u = 128.0 / (1.4 * csf);
    const double sig = u / 3.0;

    double acc = 0.0;
    for (std::size_t i = 0; i < mu1.size(); ++i) {
        const double s1 = std::sqrt(std::max(0.0, e11[i] - mu1[i] * mu1[i]));
        const double s2 = std::sqrt(std::max(0.0, e22[i] - mu2[i] * mu2[i]));
        const double s12 = e12[i] - mu1[i] * mu2[i];
        const double p1 = normal_cdf(s1, u, sig);
        const double p2 = normal_cdf(s2, u, sig);
        acc += ((2.0 * p1 * p2 + k.c1) / (p1 * p1 + p2 * p2 + k.c1)) * ((s12 + k.c2) / (s1 * s2 + k.c2));
    }
    return acc / static_cast<double>(mu1.size());
}

}  // namespace

double structural_fidelity(const Plane& hdr_lum, const Plane& ldr_lum, const TmqiConstants& k,
                           std::array<double, 5>* per_level) {
    require_same_shape(hdr_lum, ldr_lum, "tmqi luminance planes");
    const auto window = gaussian_window(k.window, k.window_sigma);
    Plane hdr = hdr_lum;
    Plane ldr = ldr_lum;
    double sf = 32.0;
    double log_s = 0.0;
    double used_weight = 0.0;
    std::array<double, 5> levels{};
    levels.fill(1.0);
    for (int l = 0; l < 5; ++l) {
        sf /= 2.0;
        // Scales smaller than the window carry no valid positions; their
        // weight is redistributed over the computed scales.
        if (hdr.width() < k.window || hdr.height() < k.window) break;
        const double s = std::max(0.0, local_structure(hdr, ldr, window, sf, k));
        levels[l] = s;
        if (s == 0.0) {
            log_s = -std::numeric_limits<double>::infinity();
        } else {
            log_s += k.level_weights[l] * std::log(s);
        }
        used_weight += k.level_weights[l];
        if (l < 4) {
            hdr = halve(hdr);
            ldr = halve(ldr);
        }
    }
    if (per_level) *per_level = levels;
    if (used_weight == 0.0) throw InvalidArgument("tmqi: image smaller than the structural window");
    double total_weight = 0.0;
    for (double w : k.level_weights) total_weight += w;
    const double s = std::exp(log_s * (total_weight / used_weight));
    return std::clamp(s, 0.0, 1.0);
}

double statistical_naturalness(const Plane& ldr_lum, const TmqiConstants& k) {
    double mean = 0.0;
    for (double v : ldr_lum.pixels()) mean += v;
    mean /= static_cast<double>(ldr_lum.size());

    // Non-overlapping blocks; partial edge blocks are zero-padded to full size.
    const int b = k.window;
    const int bw = (ldr_lum.width() + b - 1) / b;
    const int bh = (ldr_lum.height() + b - 1) / b;
    const double n = static_cast<double>(b * b);
    double sig_sum = 0.0;
    for (int by = 0; by < bh; ++by)
        for (int bx = 0; bx < bw; ++bx) {
            double s = 0.0, s2 = 0.0;
            for (int y = by * b; y < std::min((by + 1) * b, ldr_lum.height()); ++y)
                for (int x = bx * b; x < std::min((bx + 1) * b, ldr_lum.width()); ++x) {
                    s += ldr_lum.at(x, y);
                    s2 += ldr_lum.at(x, y) * ldr_lum.at(x, y);
                }
            const double var = std::max(0.0, (s2 - s * s / n) / (n - 1.0));
            sig_sum += std::sqrt(var);
        }
    const double sig = sig_sum / static_cast<double>(bw * bh);

    const double pb = std::exp(-0.5 * ((mean - k.mean_mu) / k.mean_sigma) * ((mean - k.mean_mu) / k.mean_sigma));
    const double mode = (k.contrast_a - 1.0) / (k.contrast_a + k.contrast_b - 2.0);
    const double x = sig / k.contrast_scale;
    double pc = 0.0;
    if (x > 0.0 && x < 1.0)
        pc = std::pow(x / mode, k.contrast_a - 1.0) * std::pow((1.0 - x) / (1.0 - mode), k.contrast_b - 1.0);
    return std::clamp(pb * pc, 0.0, 1.0);
}

TmqiScore tmqi(const RgbImage& fused, const RgbImage& hdr_ref, const TmqiConstants& k) {
    require_same_shape(fused, hdr_ref, "tmqi: fused vs reference");
    Plane hdr = luminance(hdr_ref);
    Plane ldr = luminance(fused);
    const auto [lo_it, hi_it] = std::minmax_element(hdr.pixels().begin(), hdr.pixels().end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double factor = hi > lo ? 4294967295.0 / (hi - lo) : 0.0;
    for (double& v : hdr.pixels()) v = std::round(factor * (v - lo));
    for (double& v : ldr.pixels()) v = 255.0 * std::clamp(v, 0.0, 1.0);

    TmqiScore r;
    r.s = structural_fidelity(hdr, ldr, k, &r.s_levels);
    r.n = statistical_naturalness(ldr, k);
    r.q = std::clamp(k.a * std::pow(r.s, k.alpha) + (1.0 - k.a) * std::pow(r.n, k.beta), 0.0, 1.0);
    return r;
}

}  // namespace huefuse
