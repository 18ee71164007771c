#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "huefuse/response.hpp"
#include "response_detail.hpp"

namespace huefuse {
namespace {

// Exposure-ratio constraint between two observations of one pixel:
// f^-1(z_lo) - ratio * f^-1(z_hi) = 0, ratio = dt_lo / dt_hi.
struct PairConstraint {
    double z_lo;
    double z_hi;
    double ratio;
};

bool usable(double z) { return z > 0.0 && z < 1.0; }

std::vector<PairConstraint> collect_pairs(const ExposureStack& stack, const std::vector<std::size_t>& samples,
                                          int ch) {
    const auto order = stack.order_by_time();
    std::vector<PairConstraint> pairs;
    pairs.reserve(samples.size() * (order.size() - 1));
    for (std::size_t s : samples) {
        for (std::size_t k = 0; k + 1 < order.size(); ++k) {
            const std::size_t lo = order[k];
            const std::size_t hi = order[k + 1];
            const double z_lo = stack.images[lo][s][ch];
            const double z_hi = stack.images[hi][s][ch];
            if (!usable(z_lo) || !usable(z_hi)) continue;
            pairs.push_back({z_lo, z_hi, stack.times[lo] / stack.times[hi]});
        }
    }
    return pairs;
}

// Least squares over c_0..c_{N-1}, with c_N = 1 - sum(c_0..c_{N-1}) fixing
// f^-1(1) = 1.
Eigen::VectorXd fit(const std::vector<PairConstraint>& pairs, int degree) {
    const auto rows = static_cast<Eigen::Index>(pairs.size());
    Eigen::MatrixXd a(rows, degree);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& p = pairs[static_cast<std::size_t>(r)];
        double plo = 1.0;
        double phi = 1.0;
        std::vector<double> d(degree + 1);
        for (int n = 0; n <= degree; ++n) {
            d[n] = plo - p.ratio * phi;
            plo *= p.z_lo;
            phi *= p.z_hi;
        }
        for (int n = 0; n < degree; ++n) a(r, n) = d[n] - d[degree];
        rhs(r) = -d[degree];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    if (qr.rank() < degree) throw EstimationFailed("Mitsunaga: rank-deficient constraint system");
    const Eigen::VectorXd partial = qr.solve(rhs);
    Eigen::VectorXd c(degree + 1);
    c.head(degree) = partial;
    c(degree) = 1.0 - partial.sum();
    return c;
}

double residual(const std::vector<PairConstraint>& pairs, const Eigen::VectorXd& c) {
    double acc = 0.0;
    for (const auto& p : pairs) {
        double flo = 0.0;
        double fhi = 0.0;
        for (Eigen::Index n = c.size() - 1; n >= 0; --n) {
            flo = flo * p.z_lo + c(n);
            fhi = fhi * p.z_hi + c(n);
        }
        const double e = flo - p.ratio * fhi;
        acc += e * e;
    }
    return pairs.empty() ? 0.0 : acc / static_cast<double>(pairs.size());
}

int select_degree(const std::vector<PairConstraint>& pairs) {
    std::vector<PairConstraint> train;
    std::vector<PairConstraint> held;
    for (std::size_t i = 0; i < pairs.size(); ++i) (i % 2 == 0 ? train : held).push_back(pairs[i]);
    int best = 3;
    double best_res = std::numeric_limits<double>::infinity();
    for (int d = 3; d <= 7; ++d) {
        if (train.size() < static_cast<std::size_t>(d) + 1) break;
        double r;
        try {
            r = residual(held, fit(train, d));
        } catch (const EstimationFailed&) {
            continue;
        }
        if (r < best_res) {
            best_res = r;
            best = d;
        }
    }
    return best;
}

}  // namespace

ResponseCurve estimate_crf_mitsunaga(const ExposureStack& stack, const MitsunagaConfig& cfg) {
    stack.validate(2);
    if (cfg.degree != 0 && cfg.degree < 2) throw InvalidArgument("Mitsunaga: degree must be >= 2 (or 0 for auto)");
    if (cfg.samples < 1) throw InvalidArgument("Mitsunaga: need at least one sample");
    const auto samples = detail::grid_samples(stack.width(), stack.height(), cfg.samples);

    std::array<std::vector<PairConstraint>, 3> pairs;
    for (int ch = 0; ch < 3; ++ch) pairs[ch] = collect_pairs(stack, samples, ch);

    int degree = cfg.degree;
    if (degree == 0) {
        // One degree for all channels: the one most channels prefer, ties low.
        std::array<int, 8> votes{};
        for (int ch = 0; ch < 3; ++ch) ++votes[select_degree(pairs[ch])];
        degree = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }

    std::array<std::vector<double>, 3> coeffs;
    for (int ch = 0; ch < 3; ++ch) {
        if (pairs[ch].size() < static_cast<std::size_t>(degree) + 1)
            throw EstimationFailed("Mitsunaga: too few unsaturated pixel pairs (channel " + std::to_string(ch) + ")");
        const Eigen::VectorXd c = fit(pairs[ch], degree);
        coeffs[ch].assign(c.data(), c.data() + c.size());
    }
    return ResponseCurve::from_polynomial(coeffs);
}

}  // namespace huefuse
