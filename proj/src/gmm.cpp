#include "huefuse/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "huefuse/error.hpp"

namespace huefuse {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : engine_(seed) {}
    double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

double log_gauss(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (kLog2Pi + std::log(var) + d * d / var);
}

std::vector<double> kmeanspp(std::span<const double> data, int k, Uniform& rng) {
    std::vector<double> centers;
    centers.reserve(k);
    const std::size_t n = data.size();
    centers.push_back(data[std::min(n - 1, static_cast<std::size_t>(rng() * n))]);
    std::vector<double> d2(n);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (double c : centers) best = std::min(best, (data[i] - c) * (data[i] - c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = n - 1;
        if (total > 0.0) {
            const double target = rng() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = std::min(n - 1, static_cast<std::size_t>(rng() * n));
        }
        centers.push_back(data[pick]);
    }
    return centers;
}

bool finite_model(const GaussianMixture1D& g) {
    for (std::size_t m = 0; m < g.size(); ++m)
        if (!std::isfinite(g.means[m]) || !std::isfinite(g.variances[m]) || !std::isfinite(g.weights[m])) return false;
    return std::isfinite(g.log_likelihood);
}

// Returns false on collapse.
bool run_em(std::span<const double> data, GaussianMixture1D& g, const EmConfig& cfg) {
    const std::size_t n = data.size();
    const std::size_t k = g.size();
    std::vector<double> resp(n * k);
    std::vector<double> logp(k);
    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.max_iterations; ++it) {
        // E step
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double mx = -std::numeric_limits<double>::infinity();
            for (std::size_t m = 0; m < k; ++m) {
                logp[m] = std::log(g.weights[m]) + log_gauss(data[i], g.means[m], g.variances[m]);
                mx = std::max(mx, logp[m]);
            }
            double s = 0.0;
            for (std::size_t m = 0; m < k; ++m) s += std::exp(logp[m] - mx);
            const double lse = mx + std::log(s);
            ll += lse;
            for (std::size_t m = 0; m < k; ++m) resp[i * k + m] = std::exp(logp[m] - lse);
        }
        g.log_likelihood = ll / static_cast<double>(n);
        g.iterations = it + 1;
        // M step
        for (std::size_t m = 0; m < k; ++m) {
            double nk = 0.0, mu = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                nk += resp[i * k + m];
                mu += resp[i * k + m] * data[i];
            }
            if (!(nk > 1e-12 * static_cast<double>(n))) return false;
            mu /= nk;
            double var = 0.0;
            for (std::size_t i = 0; i < n; ++i) var += resp[i * k + m] * (data[i] - mu) * (data[i] - mu);
            g.weights[m] = nk / static_cast<double>(n);
            g.means[m] = mu;
            g.variances[m] = var / nk + cfg.variance_floor;
        }
        if (!finite_model(g)) return false;
        if (std::abs(g.log_likelihood - prev) < cfg.tolerance) break;
        prev = g.log_likelihood;
    }
    return true;
}

}  // namespace

void GaussianMixture1D::posteriors(double x, std::span<double> out) const {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < size(); ++m) {
        out[m] = std::log(weights[m]) + log_gauss(x, means[m], variances[m]);
        mx = std::max(mx, out[m]);
    }
    double s = 0.0;
    for (std::size_t m = 0; m < size(); ++m) {
        out[m] = std::exp(out[m] - mx);
        s += out[m];
    }
    for (std::size_t m = 0; m < size(); ++m) out[m] /= s;
}

GaussianMixture1D fit_gmm_1d(std::span<const double> data, int components, std::uint64_t seed, const EmConfig& cfg) {
    if (components < 1) throw InvalidArgument("GMM: need at least one component");
    if (data.empty()) throw InvalidArgument("GMM: no data");
    for (double v : data)
        if (!std::isfinite(v)) throw InvalidArgument("GMM: non-finite sample");

    double mean = std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
    double var = 0.0;
    for (double v : data) var += (v - mean) * (v - mean);
    var = var / static_cast<double>(data.size()) + cfg.variance_floor;

    Uniform rng(seed);
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        GaussianMixture1D g;
        g.means = kmeanspp(data, components, rng);
        if (attempt > 0) {
            // Re-jitter so a retry does not land on the same degenerate start.
            const double sd = std::sqrt(var);
            for (double& m : g.means) m += (rng() - 0.5) * sd;
        }
        g.weights.assign(components, 1.0 / components);
        g.variances.assign(components, var);
        if (!run_em(data, g, cfg)) continue;

        std::vector<std::size_t> order(g.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g.means[a] < g.means[b]; });
        GaussianMixture1D sorted = g;
        for (std::size_t i = 0; i < order.size(); ++i) {
            sorted.weights[i] = g.weights[order[i]];
            sorted.means[i] = g.means[order[i]];
            sorted.variances[i] = g.variances[order[i]];
        }
        return sorted;
    }
    throw SegmentationFailed("GMM: EM collapsed after " + std::to_string(cfg.max_retries) + " retries");
}

}  // namespace huefuse
