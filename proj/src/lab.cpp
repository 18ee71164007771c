#include <algorithm>
#include <cmath>

#include "huefuse/metrics.hpp"
#include "huefuse/parallel.hpp"

namespace huefuse {
namespace {

constexpr double kM[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};
constexpr double kWhiteX = kM[0][0] + kM[0][1] + kM[0][2];
constexpr double kWhiteY = kM[1][0] + kM[1][1] + kM[1][2];
constexpr double kWhiteZ = kM[2][0] + kM[2][1] + kM[2][2];

double lab_f(double t) {
    constexpr double delta = 6.0 / 29.0;
    if (t > delta * delta * delta) return std::cbrt(t);
    return t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

Lab rgb_to_lab(const Rgb& p, TransferSpec transfer) {
    double lin[3];
    for (int ch = 0; ch < 3; ++ch) {
        const double v = std::clamp(p[ch], 0.0, 1.0);
        lin[ch] = transfer.kind == TransferSpec::Kind::Gamma ? std::pow(v, transfer.gamma) : v;
    }
    const double x = kM[0][0] * lin[0] + kM[0][1] * lin[1] + kM[0][2] * lin[2];
    const double y = kM[1][0] * lin[0] + kM[1][1] * lin[1] + kM[1][2] * lin[2];
    const double z = kM[2][0] * lin[0] + kM[2][1] * lin[1] + kM[2][2] * lin[2];
    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Grid<Lab> rgb_to_lab(const RgbImage& img, TransferSpec transfer) {
    Grid<Lab> out(img.width(), img.height());
    parallel_rows(img.height(), [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            auto src = img.row(y);
            auto dst = out.row(y);
            for (int x = 0; x < img.width(); ++x) dst[x] = rgb_to_lab(src[x], transfer);
        }
    });
    return out;
}

}  // namespace huefuse
