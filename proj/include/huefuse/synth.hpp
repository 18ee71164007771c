#pragma once

#include <cstdint>
#include <vector>

#include "huefuse/image.hpp"
#include "huefuse/response.hpp"

namespace huefuse {

struct SynthConfig {
    std::vector<double> ev_list{-4.0, -2.0, 0.0, 2.0, 4.0};
    double gamma = 2.2;
    double key = 0.18;

    void validate() const;
};

/// Factor that brings the whole-image geometric-mean luminance of `hdr` to `key`.
double key_scale(const RgbImage& hdr, double key = 0.18);

/// 2^v * key_scale * hdr, before clipping. Linear.
RgbImage expose(const RgbImage& hdr, double ev, double key = 0.18);

/// clip to [0,1], x^(1/gamma), and optionally round(x*255)/255 per channel.
RgbImage camera_encode(const RgbImage& exposure, double gamma, bool quantize = true);

/// One simulated 8-bit capture at exposure value `ev`.
RgbImage generate_exposure(const RgbImage& hdr, double ev, const SynthConfig& cfg = {});

/// One capture per EV; times are 2^ev.
ExposureStack generate_stack(const RgbImage& hdr, const SynthConfig& cfg = {});

/// Procedural HDR test scene: an illumination field spanning several stops,
/// colored objects with texture, and a few specular highlights. Deterministic
/// in `seed` on every platform.
RgbImage make_scene(std::uint64_t seed, int width, int height);

}  // namespace huefuse
