#pragma once

#include <array>
#include <optional>

#include "huefuse/image.hpp"

namespace huefuse {

struct Lab {
    double l = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// How RGB values are linearized before the sRGB-primaries -> XYZ step.
struct TransferSpec {
    enum class Kind { Linear, Gamma } kind = Kind::Linear;
    double gamma = 2.2;

    static TransferSpec linear() { return {}; }
    static TransferSpec power(double g) { return {Kind::Gamma, g}; }
};

/// Clip to [0,1], linearize, sRGB primaries to XYZ (D65), XYZ to CIELAB
/// relative to the D65 white of the same matrix (so (1,1,1) -> L* = 100).
Lab rgb_to_lab(const Rgb& p, TransferSpec transfer);
Grid<Lab> rgb_to_lab(const RgbImage& img, TransferSpec transfer);

/// CIEDE2000 with kL = kC = kH = 1. dL, dC and dH are the weighted terms
/// (delta / (k * S)) that enter dE; dH is signed.
struct Ciede2000 {
    double de = 0.0;
    double dl = 0.0;
    double dc = 0.0;
    double dh = 0.0;
};
Ciede2000 ciede2000(const Lab& p, const Lab& q);

struct MetricsConfig {
    double gamma = 2.2;  // linearization of the fused image
    double key = 0.18;   // exposure of the reference (v = 0)
};

/// HDR reference -> key-scaled, clipped, linear display image.
RgbImage reference_display(const RgbImage& hdr_ref, double key = 0.18);

/// Mean |dH| between fused (gamma-encoded) and the key-scaled clipped reference.
double mean_hue_difference(const RgbImage& fused, const RgbImage& hdr_ref, const MetricsConfig& cfg = {});

struct TmqiConstants {
    double a = 0.8012;
    double alpha = 0.3046;
    double beta = 0.7088;
    std::array<double, 5> level_weights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
    int window = 11;
    double window_sigma = 1.5;
    double c1 = 0.01;
    double c2 = 10.0;
    // Naturalness priors (8-bit lightness scale).
    double mean_mu = 115.94;
    double mean_sigma = 27.99;
    double contrast_a = 4.4;
    double contrast_b = 10.1;
    double contrast_scale = 64.29;
};

struct TmqiScore {
    double q = 0.0;
    double s = 0.0;
    double n = 0.0;
    std::array<double, 5> s_levels{};
};

/// Tone-mapped image quality index of a display image against its linear HDR
/// source. The display image's luminance is taken on the 0..255 scale as
/// stored; the HDR luminance is range-normalized.
TmqiScore tmqi(const RgbImage& fused, const RgbImage& hdr_ref, const TmqiConstants& k = {});

double structural_fidelity(const Plane& hdr_lum, const Plane& ldr_lum, const TmqiConstants& k,
                           std::array<double, 5>* per_level = nullptr);
double statistical_naturalness(const Plane& ldr_lum, const TmqiConstants& k);

struct MetricsReport {
    double mean_dh = 0.0;
    double tmqi_q = 0.0;
    double tmqi_s = 0.0;
    double tmqi_n = 0.0;
    std::optional<std::array<double, 3>> crf_mse;
};

MetricsReport evaluate(const RgbImage& fused, const RgbImage& hdr_ref, const MetricsConfig& cfg = {});

}  // namespace huefuse
