#pragma once

#include <cstdint>
#include <vector>

#include "huefuse/image.hpp"
#include "huefuse/response.hpp"

namespace huefuse {

struct SslaConfig {
    int m = 0;                // number of areas; 0 = one per input image
    double sigma_frac = 0.02; // local-average sigma as a fraction of min(H, W)
    std::uint64_t seed = 0;
    double key_value = 0.18;
    int max_gmm_samples = 65536;
};

/// Area index per pixel, 0..count-1, ordered dark to bright. Every label in
/// range is used by at least one pixel.
struct SegmentLabels {
    Grid<int> labels;
    int count = 0;

    Grid<unsigned char> mask(int area) const;
};

struct ScaledLuminance {
    std::vector<LuminancePlane> planes;  // L''_m = alpha_m * L'_source(m)
    std::vector<double> alphas;
    std::vector<std::size_t> source;     // input image index per area
};

struct AdjustedSet {
    std::vector<RgbImage> images;  // display-referred
    std::vector<double> alphas;
    std::vector<std::size_t> source;
    SegmentLabels labels;
};

/// L'_i = L_i^2 / (gaussian_local_average(L_i) + 1e-6).
std::vector<LuminancePlane> enhance_local_contrast(const std::vector<LuminancePlane>& luminances,
                                                   double sigma_frac);
std::vector<LuminancePlane> enhance_local_contrast(const ExposureStack& stack, double sigma_frac);

/// GMM on pooled ln-luminance of all planes; each pixel takes the area with
/// the largest posterior averaged over the planes. Empty areas are dropped.
SegmentLabels segment_scene(const std::vector<LuminancePlane>& enhanced, int m, std::uint64_t seed,
                            int max_samples = 65536);

/// Per area: pick the input whose geometric mean over the area is closest to
/// the key value (ties to the lower index) and scale it to that key.
ScaledLuminance scale_luminance(const std::vector<LuminancePlane>& enhanced, const SegmentLabels& labels,
                                double key_value = 0.18);

/// f(t) = t/(1+t) * (1 + t/l^2), l = max of the plane. Maps [0, l] onto [0, 1].
LuminancePlane tone_map_segment(const LuminancePlane& scaled);
double tone_curve(double t, double l_max);

/// I_m = clip((Lhat_m / L_src) * I_src); ratio is 0 where L_src < 1e-6.
std::vector<RgbImage> recombine(const std::vector<LuminancePlane>& tonemapped, const ExposureStack& stack,
                                const std::vector<std::size_t>& source,
                                const std::vector<LuminancePlane>& original_luminances);

AdjustedSet ssla(const ExposureStack& stack, const SslaConfig& cfg = {});

}  // namespace huefuse
