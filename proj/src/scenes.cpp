#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "huefuse/synth.hpp"

namespace huefuse {
namespace {

// mt19937_64 output is fully specified by the standard; the std
// distributions are not, so uniforms are derived by hand.
class SceneRng {
public:
    explicit SceneRng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

Rgb hsv_to_rgb(double h, double s, double v) {
    const double hh = std::fmod(h, 1.0) * 6.0;
    const int sector = static_cast<int>(hh) % 6;
    const double f = hh - std::floor(hh);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    switch (sector) {
        case 0: return {v, t, p};
        case 1: return {q, v, p};
        case 2: return {p, v, t};
        case 3: return {p, q, v};
        case 4: return {t, p, v};
        default: return {v, p, q};
    }
}

// Smooth lattice noise in [-1, 1].
class ValueNoise {
public:
    ValueNoise(SceneRng& rng, int width, int height, double cell) : cell_(cell) {
        nx_ = static_cast<int>(std::ceil(width / cell)) + 2;
        ny_ = static_cast<int>(std::ceil(height / cell)) + 2;
        lattice_.resize(static_cast<std::size_t>(nx_) * ny_);
        for (double& v : lattice_) v = rng.uniform(-1.0, 1.0);
    }

    double operator()(double x, double y) const {
        const double fx = x / cell_;
        const double fy = y / cell_;
        const int ix = static_cast<int>(fx);
        const int iy = static_cast<int>(fy);
        const double tx = smooth(fx - ix);
        const double ty = smooth(fy - iy);
        const double a = at(ix, iy) + tx * (at(ix + 1, iy) - at(ix, iy));
        const double b = at(ix, iy + 1) + tx * (at(ix + 1, iy + 1) - at(ix, iy + 1));
        return a + ty * (b - a);
    }

private:
    static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
    double at(int x, int y) const { return lattice_[static_cast<std::size_t>(y) * nx_ + x]; }

    double cell_;
    int nx_ = 0;
    int ny_ = 0;
    std::vector<double> lattice_;
};

struct Blob {
    double cx, cy, rx, ry;
    bool disk;
    Rgb albedo;
    double boost;  // extra stops of illumination (highlights)

    bool contains(double x, double y) const {
        const double dx = (x - cx) / rx;
        const double dy = (y - cy) / ry;
        return disk ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
    }
};

}  // namespace

RgbImage make_scene(std::uint64_t seed, int width, int height) {
    if (width < 1 || height < 1) throw InvalidArgument("make_scene: empty size");
    SceneRng rng(seed * 0x9E3779B97F4A7C15ull + 1);
    const double scale = std::min(width, height);

    // Illumination in stops: a tilted plane plus a few broad light pools.
    const double tilt_x = rng.uniform(-3.0, 3.0);
    const double tilt_y = rng.uniform(-4.0, 1.0);
    struct Pool {
        double cx, cy, r, stops;
    };
    std::vector<Pool> pools;
    const int n_pools = 2 + static_cast<int>(rng.uniform() * 3);
    for (int i = 0; i < n_pools; ++i)
        pools.push_back({rng.uniform(0, width), rng.uniform(0, height), rng.uniform(0.15, 0.4) * scale,
                         rng.uniform(-3.0, 3.0)});

    const Rgb background = hsv_to_rgb(rng.uniform(), rng.uniform(0.05, 0.35), rng.uniform(0.3, 0.7));

    std::vector<Blob> blobs;
    const int n_objects = 8 + static_cast<int>(rng.uniform() * 7);
    for (int i = 0; i < n_objects; ++i) {
        Blob b;
        b.cx = rng.uniform(0, width);
        b.cy = rng.uniform(0, height);
        b.rx = rng.uniform(0.05, 0.2) * scale;
        b.ry = rng.uniform(0.05, 0.2) * scale;
        b.disk = rng.uniform() < 0.5;
        b.albedo = hsv_to_rgb(rng.uniform(), rng.uniform(0.3, 0.95), rng.uniform(0.2, 0.9));
        b.boost = 0.0;
        blobs.push_back(b);
    }
    const int n_highlights = 1 + static_cast<int>(rng.uniform() * 3);
    for (int i = 0; i < n_highlights; ++i) {
        Blob b;
        b.cx = rng.uniform(0, width);
        b.cy = rng.uniform(0, height);
        b.rx = b.ry = rng.uniform(0.01, 0.04) * scale;
        b.disk = true;
        b.albedo = hsv_to_rgb(rng.uniform(), rng.uniform(0.0, 0.3), 1.0);
        b.boost = rng.uniform(3.0, 6.0);
        blobs.push_back(b);
    }

    const ValueNoise coarse(rng, width, height, scale / 8.0);
    const ValueNoise fine(rng, width, height, scale / 40.0);

    RgbImage out(width, height, Transfer::Linear);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = (x + 0.5) / width - 0.5;
            const double v = (y + 0.5) / height - 0.5;
            double stops = tilt_x * u + tilt_y * v;
            for (const Pool& p : pools) {
                const double dx = x - p.cx;
                const double dy = y - p.cy;
                stops += p.stops * std::exp(-(dx * dx + dy * dy) / (2.0 * p.r * p.r));
            }
            Rgb albedo = background;
            double boost = 0.0;
            for (const Blob& b : blobs) {
                if (b.contains(x + 0.5, y + 0.5)) {
                    albedo = b.albedo;
                    boost = b.boost;
                }
            }
            const double texture = std::exp2(0.6 * coarse(x, y) + 0.3 * fine(x, y));
            const double irradiance = std::exp2(stops + boost) * texture;
            Rgb px = irradiance * albedo;
            for (int ch = 0; ch < 3; ++ch) px[ch] = std::max(px[ch], 1e-5);
            out.at(x, y) = px;
        }
    }
    return out;
}

}  // namespace huefuse
