#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace huefuse {

/// One-dimensional Gaussian mixture, components sorted by ascending mean.
struct GaussianMixture1D {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> variances;
    double log_likelihood = 0.0;
    int iterations = 0;

    std::size_t size() const { return means.size(); }

    /// Posterior responsibilities p(m | x), written into `out` (size() long).
    void posteriors(double x, std::span<double> out) const;
};

struct EmConfig {
    int max_iterations = 100;
    double tolerance = 1e-6;  // on mean log-likelihood
    int max_retries = 3;
    double variance_floor = 1e-6;
};

/// EM with k-means++ seeding drawn from `seed`. A component whose weight
/// vanishes (or any non-finite parameter) triggers a re-seed; after
/// `max_retries` re-seeds SegmentationFailed is thrown.
GaussianMixture1D fit_gmm_1d(std::span<const double> data, int components, std::uint64_t seed,
                             const EmConfig& cfg = {});

}  // namespace huefuse
