#include <algorithm>
#include <cmath>

#include "huefuse/metrics.hpp"
#include "huefuse/synth.hpp"

namespace huefuse {

RgbImage reference_display(const RgbImage& hdr_ref, double key) {
    const double scale = key_scale(hdr_ref, key);
    RgbImage out(hdr_ref.width(), hdr_ref.height(), Transfer::Linear);
    for (std::size_t i = 0; i < hdr_ref.size(); ++i)
        for (int ch = 0; ch < 3; ++ch) out[i][ch] = std::clamp(scale * hdr_ref[i][ch], 0.0, 1.0);
    return out;
}

double mean_hue_difference(const RgbImage& fused, const RgbImage& hdr_ref, const MetricsConfig& cfg) {
    require_same_shape(fused, hdr_ref, "mean_hue_difference: fused vs reference");
    const Grid<Lab> ref = rgb_to_lab(reference_display(hdr_ref, cfg.key), TransferSpec::linear());
    const Grid<Lab> img = rgb_to_lab(fused, TransferSpec::power(cfg.gamma));
    double sum = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) sum += std::abs(ciede2000(img[i], ref[i]).dh);
    return sum / static_cast<double>(ref.size());
}

MetricsReport evaluate(const RgbImage& fused, const RgbImage& hdr_ref, const MetricsConfig& cfg) {
    MetricsReport r;
    r.mean_dh = mean_hue_difference(fused, hdr_ref, cfg);
    const TmqiScore t = tmqi(fused, hdr_ref);
    r.tmqi_q = t.q;
    r.tmqi_s = t.s;
    r.tmqi_n = t.n;
    return r;
}

}  // namespace huefuse
