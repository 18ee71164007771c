#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "huefuse/color_core.hpp"
#include "huefuse/response.hpp"
#include "response_detail.hpp"

namespace huefuse {
namespace {

constexpr int kCodes = 256;
constexpr int kMidCode = 128;

// integer hat on codes 0..255
double code_weight(int z) { return z <= 127 ? z : 255 - z; }

// One pixel per grid cell: the one with the smallest 3x3 luminance variance
// in the middle exposure (smooth regions give stable correspondences).
std::vector<std::size_t> pick_samples(const ExposureStack& stack, int count) {
    const int w = stack.width();
    const int h = stack.height();
    const auto order = stack.order_by_time();
    const RgbImage& mid = stack.images[order[order.size() / 2]];
    const LuminancePlane lum = luminance(mid);

    auto local_var = [&](int x, int y) {
        double s = 0.0, s2 = 0.0;
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int xx = std::clamp(x + dx, 0, w - 1);
                const int yy = std::clamp(y + dy, 0, h - 1);
                const double v = lum.at(xx, yy);
                s += v;
                s2 += v * v;
                ++n;
            }
        }
        const double m = s / n;
        return s2 / n - m * m;
    };

    const auto total = static_cast<std::size_t>(w) * h;
    if (static_cast<std::size_t>(count) >= total) return detail::grid_samples(w, h, count);

    const int side = std::max(1, static_cast<int>(std::round(std::sqrt(static_cast<double>(count)))));
    const int nx = std::min(side, w);
    const int ny = std::min(side, h);
    std::vector<std::size_t> out;
    out.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        const int cy0 = j * h / ny;
        const int cy1 = std::max(cy0 + 1, (j + 1) * h / ny);
        for (int i = 0; i < nx; ++i) {
            const int cx0 = i * w / nx;
            const int cx1 = std::max(cx0 + 1, (i + 1) * w / nx);
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_idx = static_cast<std::size_t>(cy0) * w + cx0;
            for (int y = cy0; y < cy1; ++y) {
                for (int x = cx0; x < cx1; ++x) {
                    const double v = local_var(x, y);
                    if (v < best) {
                        best = v;
                        best_idx = static_cast<std::size_t>(y) * w + x;
                    }
                }
            }
            out.push_back(best_idx);
        }
    }
    return out;
}

ResponseCurve::Lut solve_channel(const ExposureStack& stack, const std::vector<std::size_t>& samples, int ch,
                                 double lambda) {
    const std::size_t n_img = stack.size();
    const std::size_t n_samp = samples.size();

    // Drop samples that carry no cross-exposure information.
    std::vector<std::vector<int>> codes;
    codes.reserve(n_samp);
    for (std::size_t s : samples) {
        std::vector<int> z(n_img);
        bool varies = false;
        double wsum = 0.0;
        for (std::size_t i = 0; i < n_img; ++i) {
            z[i] = detail::to_code(stack.images[i][s][ch]);
            wsum += code_weight(z[i]);
            if (z[i] != z[0]) varies = true;
        }
        if (varies && wsum > 0.0) codes.push_back(std::move(z));
    }
    if (codes.size() < 2)
        throw EstimationFailed("Debevec: no sample changes value across exposures (channel " + std::to_string(ch) +
                               ")");

    const std::size_t n_rows = codes.size() * n_img + 1 + (kCodes - 2);
    const std::size_t n_cols = kCodes + codes.size();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(n_cols));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_rows));

    Eigen::Index row = 0;
    for (std::size_t j = 0; j < codes.size(); ++j) {
        for (std::size_t i = 0; i < n_img; ++i) {
            const int z = codes[j][i];
            const double wij = code_weight(z);
            a(row, z) = wij;
            a(row, static_cast<Eigen::Index>(kCodes + j)) = -wij;
            b(row) = wij * std::log(stack.times[i]);
            ++row;
        }
    }
    a(row, kMidCode) = 1.0;
    ++row;
    for (int z = 1; z < kCodes - 1; ++z) {
        const double wz = lambda * code_weight(z);
        a(row, z - 1) = wz;
        a(row, z) = -2.0 * wz;
        a(row, z + 1) = wz;
        ++row;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < static_cast<Eigen::Index>(n_cols))
        throw EstimationFailed("Debevec: singular system (channel " + std::to_string(ch) + ")");
    const Eigen::VectorXd x = qr.solve(b);

    ResponseCurve::Lut lut{};
    for (int z = 0; z < kCodes; ++z) {
        if (!std::isfinite(x(z))) throw EstimationFailed("Debevec: non-finite solution");
        lut[z] = x(z);
    }
    return lut;
}

}  // namespace

ResponseCurve estimate_crf_debevec(const ExposureStack& stack, const DebevecConfig& cfg) {
    stack.validate(2);
    if (cfg.samples < 2) throw InvalidArgument("Debevec: need at least 2 samples");
    if (!(cfg.smoothness >= 0.0)) throw InvalidArgument("Debevec: smoothness must be non-negative");
    const auto samples = pick_samples(stack, cfg.samples);
    if (samples.size() * stack.size() < kCodes + samples.size())
        throw EstimationFailed("Debevec: system is underdetermined for this stack size");
    std::array<ResponseCurve::Lut, 3> luts{};
    for (int ch = 0; ch < 3; ++ch) luts[ch] = solve_channel(stack, samples, ch, cfg.smoothness);
    return ResponseCurve::from_log_lut(luts);
}

}  // namespace huefuse
