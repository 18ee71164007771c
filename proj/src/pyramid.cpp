#include "huefuse/pyramid.hpp"

#include <array>
#include <cmath>

#include "huefuse/filters.hpp"
#include "huefuse/parallel.hpp"

namespace huefuse {
namespace {

constexpr std::array<double, 5> kBinomial{1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};

int floor_half(int v) { return v >= 0 ? v / 2 : -((1 - v) / 2); }

// Expansion along one axis: out[x] = sum_i 2 k(x - 2i) in[i].
void upsample_line(const double* in, int n_in, int in_stride, double* out, int n_out, int out_stride) {
    for (int x = 0; x < n_out; ++x) {
        double acc = 0.0;
        // Coarse samples with |x - 2i| <= 2; i may fall outside and is mirrored.
        for (int i = floor_half(x - 2); i <= floor_half(x + 2); ++i) {
            const int t = x - 2 * i;
            if (t > 2) continue;
            acc += 2.0 * kBinomial[t + 2] * in[static_cast<std::ptrdiff_t>(mirror_index(i, n_in)) * in_stride];
        }
        out[static_cast<std::ptrdiff_t>(x) * out_stride] = acc;
    }
}

}  // namespace

Plane pyr_down(const Plane& src) {
    const Plane blurred = convolve_separable(src, kBinomial);
    const int w = (src.width() + 1) / 2;
    const int h = (src.height() + 1) / 2;
    Plane out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = blurred.at(2 * x, 2 * y);
    return out;
}

Plane pyr_up(const Plane& coarse, int width, int height) {
    const int cw = coarse.width();
    const int ch = coarse.height();
    Plane tmp(width, ch);
    for (int y = 0; y < ch; ++y) upsample_line(&coarse.at(0, y), cw, 1, &tmp.at(0, y), width, 1);
    Plane out(width, height);
    parallel_rows(width, [&](int x0, int x1) {
        for (int x = x0; x < x1; ++x) upsample_line(&tmp.at(x, 0), ch, width, &out.at(x, 0), height, width);
    });
    return out;
}

int max_pyramid_levels(int width, int height) {
    const int m = std::min(width, height);
    if (m <= 1) return 1;
    return std::max(1, static_cast<int>(std::floor(std::log2(static_cast<double>(m)))));
}

Pyramid gaussian_pyramid(const Plane& src, int levels) {
    if (levels < 1) throw InvalidArgument("pyramid: levels must be >= 1");
    Pyramid p;
    p.reserve(levels);
    p.push_back(src);
    for (int l = 1; l < levels; ++l) p.push_back(pyr_down(p.back()));
    return p;
}

Pyramid laplacian_pyramid(const Plane& src, int levels) {
    Pyramid g = gaussian_pyramid(src, levels);
    for (int l = 0; l + 1 < levels; ++l) {
        const Plane up = pyr_up(g[l + 1], g[l].width(), g[l].height());
        for (std::size_t i = 0; i < g[l].size(); ++i) g[l][i] -= up[i];
    }
    return g;
}

Plane collapse(const Pyramid& laplacian) {
    if (laplacian.empty()) throw InvalidArgument("collapse: empty pyramid");
    Plane acc = laplacian.back();
    for (int l = static_cast<int>(laplacian.size()) - 2; l >= 0; --l) {
        Plane up = pyr_up(acc, laplacian[l].width(), laplacian[l].height());
        for (std::size_t i = 0; i < up.size(); ++i) up[i] += laplacian[l][i];
        acc = std::move(up);
    }
    return acc;
}

}  // namespace huefuse
