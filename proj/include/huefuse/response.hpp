#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "huefuse/image.hpp"

namespace huefuse {

/// Differently exposed display-referred images of one static scene.
struct ExposureStack {
    std::vector<RgbImage> images;
    std::vector<double> times;  // relative integration times, > 0

    std::size_t size() const { return images.size(); }
    int width() const { return images.empty() ? 0 : images.front().width(); }
    int height() const { return images.empty() ? 0 : images.front().height(); }

    /// Throws unless there are at least `min_images` images of equal size with
    /// positive times (pairwise distinct when `distinct_times`).
    void validate(std::size_t min_images = 2, bool distinct_times = true) const;

    /// Indices ordered by increasing integration time.
    std::vector<std::size_t> order_by_time() const;
};

enum class CurveKind { Lut256, Polynomial };

/// Estimate of the inverse camera response per channel. Internally every
/// curve carries g = ln f^-1 sampled at the 256 display codes k/255; the
/// polynomial form additionally keeps its coefficients (normalized so that
/// f^-1(1) = 1).
class ResponseCurve {
public:
    using Lut = std::array<double, 256>;

    ResponseCurve() = default;

    /// Takes log-exposure tables. Entry 0 is replaced by the ln-z extrapolation
    /// to z = 1/512 and each channel is made non-decreasing.
    static ResponseCurve from_log_lut(const std::array<Lut, 3>& log_lut);
    static ResponseCurve from_polynomial(const std::array<std::vector<double>, 3>& coeffs);
    /// f^-1(z) = z^gamma, the inverse of the synthetic camera.
    static ResponseCurve gamma(double gamma);

    CurveKind kind() const { return kind_; }
    int degree() const { return coeffs_[0].empty() ? 0 : static_cast<int>(coeffs_[0].size()) - 1; }
    const std::vector<double>& coefficients(int ch) const { return coeffs_[ch]; }
    const Lut& log_lut(int ch) const { return lut_[ch]; }

    /// g(z) = ln f^-1(z), linearly interpolated between the 256 codes.
    double log_exposure(int ch, double z) const;

    /// f^-1(z) normalized so f^-1(1) = 1. Polynomials are evaluated directly.
    double inverse_normalized(int ch, double z) const;

    void write(std::ostream& os) const;
    static ResponseCurve read(std::istream& is);
    void save(const std::string& path) const;
    static ResponseCurve load(const std::string& path);

private:
    CurveKind kind_ = CurveKind::Lut256;
    std::array<Lut, 3> lut_{};
    std::array<std::vector<double>, 3> coeffs_{};
};

/// Hat weighting on [0,1]: z for z <= 0.5, 1 - z above.
double hat_weight(double z);

struct DebevecConfig {
    int samples = 256;
    double smoothness = 50.0;
};

struct MitsunagaConfig {
    int degree = 5;  // 0 selects 3..7 by held-out residual
    int samples = 10000;
};

ResponseCurve estimate_crf_debevec(const ExposureStack& stack, const DebevecConfig& cfg = {});
ResponseCurve estimate_crf_mitsunaga(const ExposureStack& stack, const MitsunagaConfig& cfg = {});

struct RadianceMap {
    RgbImage image;  // linear
    std::string estimator;
    std::string weight = "hat";
};

/// Weighted log-domain merge: ln E = sum w(z_i)(g(z_i) - ln dt_i) / sum w(z_i).
/// Channels with zero total weight take the exposure whose value is closest
/// to 0.5.
RadianceMap merge_hdr(const ExposureStack& stack, const ResponseCurve& curve);

/// Mean squared difference between the normalized estimate and z^gamma at
/// the 256 codes, per channel.
std::array<double, 3> crf_mse(const ResponseCurve& curve, double reference_gamma);

}  // namespace huefuse
