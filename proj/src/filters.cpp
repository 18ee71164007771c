#include "huefuse/filters.hpp"

#include <cmath>

#include "huefuse/parallel.hpp"

namespace huefuse {

int mirror_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) i += period;
    return i < n ? i : period - i;
}

Plane convolve_separable(const Plane& src, std::span<const double> kernel) {
    const int w = src.width();
    const int h = src.height();
    const int radius = static_cast<int>(kernel.size() / 2);
    Plane tmp(w, h);
    Plane out(w, h);
    parallel_rows(h, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            auto in = src.row(y);
            auto dst = tmp.row(y);
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * in[mirror_index(x + k, w)];
                dst[x] = acc;
            }
        }
    });
    parallel_rows(h, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            auto dst = out.row(y);
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * tmp.at(x, mirror_index(y + k, h));
                dst[x] = acc;
            }
        }
    });
    return out;
}

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("gaussian_kernel: sigma must be positive");
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

Plane gaussian_blur(const Plane& src, double sigma) {
    const auto k = gaussian_kernel(sigma);
    return convolve_separable(src, k);
}

Plane laplacian(const Plane& src) {
    const int w = src.width();
    const int h = src.height();
    Plane out(w, h);
    parallel_rows(h, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const int yu = mirror_index(y - 1, h);
            const int yd = mirror_index(y + 1, h);
            for (int x = 0; x < w; ++x) {
                const int xl = mirror_index(x - 1, w);
                const int xr = mirror_index(x + 1, w);
                out.at(x, y) = src.at(xl, y) + src.at(xr, y) + src.at(x, yu) + src.at(x, yd) - 4.0 * src.at(x, y);
            }
        }
    });
    return out;
}

}  // namespace huefuse
