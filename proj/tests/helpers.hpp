#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "huefuse/image.hpp"

namespace testing {

inline huefuse::RgbImage random_image(int w, int h, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    huefuse::RgbImage img(w, h);
    for (auto& p : img.pixels()) p = {u(rng), u(rng), u(rng)};
    return img;
}

inline huefuse::Plane random_plane(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    huefuse::Plane p(w, h);
    for (auto& v : p.pixels()) v = u(rng);
    return p;
}

inline double max_abs_diff(const huefuse::RgbImage& a, const huefuse::RgbImage& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(a[i][c] - b[i][c]));
    return m;
}

inline double max_abs_diff(const huefuse::Plane& a, const huefuse::Plane& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Fresh scratch directory per test, removed on scope exit.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("huefuse_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace testing
