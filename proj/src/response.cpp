#include "huefuse/response.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "huefuse/parallel.hpp"
#include "response_detail.hpp"

namespace huefuse {

namespace detail {

void isotonic_non_decreasing(std::span<double> values) {
    struct Block {
        double sum;
        std::size_t count;
        double mean() const { return sum / static_cast<double>(count); }
    };
    std::vector<Block> blocks;
    blocks.reserve(values.size());
    for (double v : values) {
        blocks.push_back({v, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
            Block top = blocks.back();
            blocks.pop_back();
            blocks.back().sum += top.sum;
            blocks.back().count += top.count;
        }
    }
    std::size_t i = 0;
    for (const Block& b : blocks) {
        const double m = b.mean();
        for (std::size_t k = 0; k < b.count; ++k) values[i++] = m;
    }
}

int to_code(double z) {
    const double c = std::round(std::clamp(z, 0.0, 1.0) * 255.0);
    return static_cast<int>(c);
}

std::vector<std::size_t> grid_samples(int width, int height, int count) {
    std::vector<std::size_t> out;
    if (width <= 0 || height <= 0 || count <= 0) return out;
    const std::size_t total = static_cast<std::size_t>(width) * height;
    if (static_cast<std::size_t>(count) >= total) {
        out.resize(total);
        std::iota(out.begin(), out.end(), std::size_t{0});
        return out;
    }
    // Square-ish lattice with cell centers, aspect matched to the image.
    const double aspect = static_cast<double>(width) / height;
    int nx = std::max(1, static_cast<int>(std::floor(std::sqrt(count * aspect))));
    int ny = std::max(1, count / nx);
    nx = std::min(nx, width);
    ny = std::min(ny, height);
    out.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        const int y = static_cast<int>((j + 0.5) * height / ny);
        for (int i = 0; i < nx; ++i) {
            const int x = static_cast<int>((i + 0.5) * width / nx);
            out.push_back(static_cast<std::size_t>(y) * width + x);
        }
    }
    return out;
}

}  // namespace detail

namespace {

// g at z = 1/512, extrapolated linearly in ln z from codes 1 and 2.
double zero_floor(const ResponseCurve::Lut& lut) {
    const double slope = (lut[2] - lut[1]) / std::log(2.0);
    return lut[1] + slope * std::log(255.0 / 512.0);
}

void finalize_lut(ResponseCurve::Lut& lut) {
    detail::isotonic_non_decreasing(std::span<double>(lut.data() + 1, 255));
    lut[0] = std::min(zero_floor(lut), lut[1]);
}

double eval_poly(const std::vector<double>& c, double z) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

std::string fmt17(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

void ExposureStack::validate(std::size_t min_images, bool distinct_times) const {
    if (images.size() < min_images)
        throw InvalidArgument("exposure stack needs at least " + std::to_string(min_images) + " images");
    if (times.size() != images.size()) throw InvalidArgument("exposure stack: one time per image required");
    for (const auto& img : images) {
        if (!img.same_shape(images.front())) throw DimensionMismatch("exposure stack images differ in size");
        if (img.empty()) throw InvalidArgument("exposure stack: empty image");
    }
    std::set<double> seen;
    for (double t : times) {
        if (!(t > 0.0) || !std::isfinite(t)) throw InvalidArgument("exposure stack: times must be positive");
        if (distinct_times && !seen.insert(t).second) throw InvalidArgument("exposure stack: duplicate integration time");
    }
}

std::vector<std::size_t> ExposureStack::order_by_time() const {
    std::vector<std::size_t> idx(times.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    return idx;
}

ResponseCurve ResponseCurve::from_log_lut(const std::array<Lut, 3>& log_lut) {
    ResponseCurve c;
    c.kind_ = CurveKind::Lut256;
    c.lut_ = log_lut;
    for (auto& lut : c.lut_) {
        for (double v : lut)
            if (!std::isfinite(v)) throw InvalidArgument("response curve: non-finite table entry");
        finalize_lut(lut);
    }
    return c;
}

ResponseCurve ResponseCurve::from_polynomial(const std::array<std::vector<double>, 3>& coeffs) {
    ResponseCurve c;
    c.kind_ = CurveKind::Polynomial;
    for (int ch = 0; ch < 3; ++ch) {
        if (coeffs[ch].size() < 2 || coeffs[ch].size() != coeffs[0].size())
            throw InvalidArgument("response curve: polynomial degree mismatch");
        const double at_one = eval_poly(coeffs[ch], 1.0);
        if (!(at_one > 0.0) || !std::isfinite(at_one))
            throw EstimationFailed("response polynomial does not reach a positive value at z = 1");
        c.coeffs_[ch] = coeffs[ch];
        for (double& v : c.coeffs_[ch]) v /= at_one;

        // Tiny positive floor keeps the log finite where the fit dips to zero.
        constexpr double kFloor = 1e-9;
        Lut& lut = c.lut_[ch];
        std::array<double, 256> lin{};
        for (int k = 0; k < 256; ++k) lin[k] = eval_poly(c.coeffs_[ch], detail::code_value(k));
        detail::isotonic_non_decreasing(std::span<double>(lin.data() + 1, 255));
        for (int k = 0; k < 256; ++k) lut[k] = std::log(std::max(lin[k], kFloor));
        lut[0] = std::min(zero_floor(lut), lut[1]);
    }
    return c;
}

ResponseCurve ResponseCurve::gamma(double gamma) {
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
    std::array<Lut, 3> lut{};
    for (auto& l : lut) {
        l[0] = 0.0;  // replaced by the floor
        for (int k = 1; k < 256; ++k) l[k] = gamma * std::log(detail::code_value(k));
    }
    return from_log_lut(lut);
}

double ResponseCurve::log_exposure(int ch, double z) const {
    const double pos = std::clamp(z, 0.0, 1.0) * 255.0;
    const int k = std::min(254, static_cast<int>(pos));
    const double t = pos - k;
    const Lut& lut = lut_[ch];
    if (t == 0.0) return lut[k];
    return lut[k] + t * (lut[k + 1] - lut[k]);
}

double ResponseCurve::inverse_normalized(int ch, double z) const {
    if (kind_ == CurveKind::Polynomial) return eval_poly(coeffs_[ch], z);
    return std::exp(log_exposure(ch, z) - lut_[ch][255]);
}

void ResponseCurve::write(std::ostream& os) const {
    if (kind_ == CurveKind::Lut256) {
        os << "lut256\n";
        for (int k = 0; k < 256; ++k) {
            os << fmt17(detail::code_value(k));
            for (int ch = 0; ch < 3; ++ch) os << ' ' << fmt17(lut_[ch][k]);
            os << '\n';
        }
        return;
    }
    os << "polynomial " << degree() << '\n';
    static constexpr const char* kNames[3] = {"r", "g", "b"};
    for (int ch = 0; ch < 3; ++ch) {
        os << kNames[ch];
        for (double c : coeffs_[ch]) os << ' ' << fmt17(c);
        os << '\n';
    }
}

ResponseCurve ResponseCurve::read(std::istream& is) {
    std::string tag;
    if (!(is >> tag)) throw DecodeError(DecodeError::Kind::Truncated, "response curve: empty input");
    if (tag == "lut256") {
        std::array<Lut, 3> lut{};
        for (int k = 0; k < 256; ++k) {
            double z = 0.0;
            if (!(is >> z >> lut[0][k] >> lut[1][k] >> lut[2][k]))
                throw DecodeError(DecodeError::Kind::Truncated, "response curve: truncated table");
        }
        ResponseCurve c;
        c.kind_ = CurveKind::Lut256;
        c.lut_ = lut;  // stored tables are already finalized
        return c;
    }
    if (tag == "polynomial") {
        int degree = 0;
        if (!(is >> degree) || degree < 1 || degree > 32)
            throw DecodeError(DecodeError::Kind::BadHeader, "response curve: bad polynomial degree");
        std::array<std::vector<double>, 3> coeffs;
        for (int ch = 0; ch < 3; ++ch) {
            std::string name;
            if (!(is >> name)) throw DecodeError(DecodeError::Kind::Truncated, "response curve: missing channel");
            coeffs[ch].resize(degree + 1);
            for (double& v : coeffs[ch])
                if (!(is >> v)) throw DecodeError(DecodeError::Kind::Truncated, "response curve: missing coefficient");
        }
        return from_polynomial(coeffs);
    }
    throw DecodeError(DecodeError::Kind::BadMagic, "response curve: unknown representation '" + tag + "'");
}

void ResponseCurve::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw EncodeError("cannot open " + path + " for writing");
    write(os);
    if (!os) throw EncodeError("write failed: " + path);
}

ResponseCurve ResponseCurve::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DecodeError(DecodeError::Kind::Io, "cannot open " + path);
    return read(is);
}

double hat_weight(double z) { return z <= 0.5 ? z : 1.0 - z; }

RadianceMap merge_hdr(const ExposureStack& stack, const ResponseCurve& curve) {
    stack.validate(1, false);
    const int w = stack.width();
    const int h = stack.height();
    const std::size_t n = stack.size();
    std::vector<double> log_dt(n);
    for (std::size_t i = 0; i < n; ++i) log_dt[i] = std::log(stack.times[i]);

    RadianceMap out;
    out.image = RgbImage(w, h, Transfer::Linear);
    out.estimator = curve.kind() == CurveKind::Polynomial ? "polynomial" : "lut256";
    parallel_rows(h, [&](int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            for (int x = 0; x < w; ++x) {
                Rgb px;
                for (int ch = 0; ch < 3; ++ch) {
                    double num = 0.0;
                    double den = 0.0;
                    std::size_t best = 0;
                    double best_dist = std::numeric_limits<double>::infinity();
                    for (std::size_t i = 0; i < n; ++i) {
                        const double z = stack.images[i].at(x, y)[ch];
                        const double wt = hat_weight(z);
                        num += wt * (curve.log_exposure(ch, z) - log_dt[i]);
                        den += wt;
                        const double dist = std::abs(z - 0.5);
                        if (dist < best_dist) {
                            best_dist = dist;
                            best = i;
                        }
                    }
                    double log_e;
                    if (den > 0.0) {
                        log_e = num / den;
                    } else {
                        const double z = stack.images[best].at(x, y)[ch];
                        log_e = curve.log_exposure(ch, z) - log_dt[best];
                    }
                    px[ch] = std::exp(log_e);
                }
                out.image.at(x, y) = px;
            }
        }
    });
    return out;
}

std::array<double, 3> crf_mse(const ResponseCurve& curve, double reference_gamma) {
    std::array<double, 3> mse{};
    for (int ch = 0; ch < 3; ++ch) {
        double acc = 0.0;
        for (int k = 0; k < 256; ++k) {
            const double z = detail::code_value(k);
            const double d = curve.inverse_normalized(ch, z) - std::pow(z, reference_gamma);
            acc += d * d;
        }
        mse[ch] = acc / 256.0;
    }
    return mse;
}

}  // namespace huefuse
