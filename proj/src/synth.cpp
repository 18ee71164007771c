#include "huefuse/synth.hpp"

#include <algorithm>
#include <cmath>

#include "huefuse/color_core.hpp"
#include "huefuse/parallel.hpp"

namespace huefuse {

void SynthConfig::validate() const {
    if (ev_list.empty()) throw InvalidArgument("synth: ev list is empty");
    if (!(gamma > 0.0)) throw InvalidArgument("synth: gamma must be positive");
    if (!(key > 0.0)) throw InvalidArgument("synth: key must be positive");
}

double key_scale(const RgbImage& hdr, double key) {
    const LuminancePlane lum = luminance(hdr);
    const bool all_black = std::all_of(lum.pixels().begin(), lum.pixels().end(), [](double v) { return v <= 0.0; });
    if (all_black) throw InvalidArgument("synth: HDR image is black (geometric mean is zero)");
    return key / geometric_mean(lum);
}

RgbImage expose(const RgbImage& hdr, double ev, double key) {
    const double scale = std::exp2(ev) * key_scale(hdr, key);
    RgbImage out(hdr.width(), hdr.height(), Transfer::Linear);
    for (std::size_t i = 0; i < hdr.size(); ++i) out[i] = scale * hdr[i];
    return out;
}

RgbImage camera_encode(const RgbImage& exposure, double gamma, bool quantize) {
    RgbImage out(exposure.width(), exposure.height(), Transfer::Display);
    const double inv = 1.0 / gamma;
    parallel_rows(exposure.height(), [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            auto src = exposure.row(y);
            auto dst = out.row(y);
            for (int x = 0; x < exposure.width(); ++x) {
                for (int ch = 0; ch < 3; ++ch) {
                    double v = std::pow(std::clamp(src[x][ch], 0.0, 1.0), inv);
                    // std::round is half-away-from-zero.
                    if (quantize) v = std::round(v * 255.0) / 255.0;
                    dst[x][ch] = v;
                }
            }
        }
    });
    return out;
}

RgbImage generate_exposure(const RgbImage& hdr, double ev, const SynthConfig& cfg) {
    cfg.validate();
    return camera_encode(expose(hdr, ev, cfg.key), cfg.gamma, true);
}

ExposureStack generate_stack(const RgbImage& hdr, const SynthConfig& cfg) {
    cfg.validate();
    const double scale = key_scale(hdr, cfg.key);
    ExposureStack stack;
    for (double ev : cfg.ev_list) {
        const double s = std::exp2(ev) * scale;
        RgbImage x(hdr.width(), hdr.height(), Transfer::Linear);
        for (std::size_t i = 0; i < hdr.size(); ++i) x[i] = s * hdr[i];
        stack.images.push_back(camera_encode(x, cfg.gamma, true));
        stack.times.push_back(std::exp2(ev));
    }
    return stack;
}

}  // namespace huefuse
