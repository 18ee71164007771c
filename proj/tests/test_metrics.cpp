#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "huefuse/color_core.hpp"
#include "huefuse/fusion.hpp"
#include "huefuse/metrics.hpp"
#include "huefuse/synth.hpp"

using namespace huefuse;

namespace {

struct Pair {
    Lab p, q;
    double de;
};

std::vector<Pair> load_pairs() {
    std::ifstream in(std::string(HUEFUSE_TEST_DATA) + "/ciede2000_pairs.txt");
    std::vector<Pair> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        Pair pr;
        ss >> pr.p.l >> pr.p.a >> pr.p.b >> pr.q.l >> pr.q.a >> pr.q.b >> pr.de;
        out.push_back(pr);
    }
    return out;
}

// textbook sRGB (D65) matrix and CIELAB
Lab lab_oracle(double r, double g, double b) {
    const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
    const double xn = 0.95047, yn = 1.0, zn = 1.08883;
    auto f = [](double t) { return t > 216.0 / 24389.0 ? std::cbrt(t) : (24389.0 / 27.0 * t + 16.0) / 116.0; };
    const double fx = f(x / xn), fy = f(y / yn), fz = f(z / zn);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

RgbImage encode(const RgbImage& lin, double gamma) {
    RgbImage out(lin.width(), lin.height(), Transfer::Display);
    for (std::size_t i = 0; i < lin.size(); ++i)
        for (int c = 0; c < 3; ++c) out[i][c] = std::pow(std::clamp(lin[i][c], 0.0, 1.0), 1.0 / gamma);
    return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("ciede2000: 34 reference pairs") {
    const auto pairs = load_pairs();
    REQUIRE(pairs.size() == 34);
    for (const auto& pr : pairs) {
        CHECK(std::abs(ciede2000(pr.p, pr.q).de - pr.de) < 1e-4);
    }
}

TEST_CASE("ciede2000: symmetric, zero on identical colors") {
    const auto pairs = load_pairs();
    for (const auto& pr : pairs) {
        CHECK(ciede2000(pr.q, pr.p).de == doctest::Approx(ciede2000(pr.p, pr.q).de).epsilon(1e-12));
        CHECK(ciede2000(pr.p, pr.p).de == 0.0);
    }
}

TEST_CASE("ciede2000: pure lightness and pure hue differences") {
    const Lab p{50, 30, 0};
    const auto dl = ciede2000(p, {60, 30, 0});
    CHECK(dl.dc == doctest::Approx(0.0));
    CHECK(dl.dh == doctest::Approx(0.0));
    CHECK(std::abs(dl.dl) == doctest::Approx(dl.de));
    const auto dh = ciede2000(p, {50, 0, 30});
    CHECK(std::abs(dh.dh) > 1.0);
    CHECK(dh.dl == doctest::Approx(0.0));
}

TEST_CASE("lab: white, black, gray and a color against the textbook formula") {
    const Lab w = rgb_to_lab({1, 1, 1}, TransferSpec::linear());
    CHECK(w.l == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(std::abs(w.a) < 1e-6);
    CHECK(std::abs(w.b) < 1e-6);
    const Lab k = rgb_to_lab({0, 0, 0}, TransferSpec::linear());
    CHECK(k.l == doctest::Approx(0.0));
    const Lab g = rgb_to_lab({0.18, 0.18, 0.18}, TransferSpec::linear());
    CHECK(g.l == doctest::Approx(116.0 * std::cbrt(0.18) - 16.0).epsilon(1e-9));
    CHECK(std::abs(g.a) < 1e-6);
    CHECK(std::abs(g.b) < 1e-6);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double r = u(rng), gg = u(rng), b = u(rng);
        const Lab x = rgb_to_lab({r, gg, b}, TransferSpec::linear());
        const Lab o = lab_oracle(r, gg, b);
        CHECK(std::abs(x.l - o.l) < 1e-3);
        CHECK(std::abs(x.a - o.a) < 1e-2);
        CHECK(std::abs(x.b - o.b) < 1e-2);
    }
    // gamma transfer linearizes first
    const Lab e = rgb_to_lab({std::pow(0.3, 1 / 2.2), 0.5, 0.7}, TransferSpec::power(2.2));
    const Lab o = lab_oracle(0.3, std::pow(0.5, 2.2), std::pow(0.7, 2.2));
    CHECK(std::abs(e.l - o.l) < 1e-3);
    CHECK(std::abs(e.a - o.a) < 1e-2);
}

TEST_CASE("hue difference: encoded reference scores zero, swaps and gray scaling") {
    const RgbImage hdr = make_scene(3, 64, 64);
    const RgbImage ref = reference_display(hdr);
    const RgbImage enc = encode(ref, 2.2);
    CHECK(mean_hue_difference(enc, hdr) < 1e-9);

    RgbImage swapped = enc;
    for (auto& p : swapped.pixels()) std::swap(p.r, p.g);
    CHECK(mean_hue_difference(swapped, hdr) > 1.0);

    // gray reference and gray fused image of another level: no hue difference
    RgbImage gray_hdr(8, 8, Transfer::Linear, {0.3, 0.3, 0.3});
    RgbImage gray_fused(8, 8, Transfer::Display, {0.7, 0.7, 0.7});
    CHECK(mean_hue_difference(gray_fused, gray_hdr) < 1e-9);
}

TEST_CASE("reference display: key-scaled and clipped") {
    RgbImage hdr(2, 1, Transfer::Linear);
    hdr[0] = {1.0, 1.0, 1.0};
    hdr[1] = {100.0, 100.0, 100.0};
    const RgbImage ref = reference_display(hdr);
    const double s = key_scale(hdr);
    CHECK(ref[0].r == doctest::Approx(std::min(1.0, s)));
    CHECK(ref[1].r == 1.0);
}

TEST_CASE("tmqi: components in range, naturalness of a flat image") {
    const RgbImage hdr = make_scene(5, 96, 96);
    const auto stack = generate_stack(hdr);
    for (const auto& img : stack.images) {
        const auto t = tmqi(img, hdr);
        CHECK(t.q >= 0.0);
        CHECK(t.q <= 1.0);
        CHECK(t.s >= 0.0);
        CHECK(t.s <= 1.0);
        CHECK(t.n >= 0.0);
        CHECK(t.n <= 1.0);
    }
    CHECK(statistical_naturalness(Plane(64, 64, 0.5), {}) == doctest::Approx(0.0));
}

TEST_CASE("tmqi: structural fidelity falls with noise") {
    const RgbImage hdr = make_scene(8, 96, 96);
    const RgbImage base = encode(reference_display(hdr), 2.2);
    std::vector<double> s;
    for (double sd : {0.0, 0.05, 0.15, 0.4}) {
        RgbImage noisy = base;
        std::mt19937_64 rng(9);
        std::normal_distribution<double> n(0.0, sd > 0 ? sd : 1.0);
        if (sd > 0)
            for (auto& p : noisy.pixels()) {
                const double d = n(rng);
                for (int c = 0; c < 3; ++c) p[c] = std::clamp(p[c] + d, 0.0, 1.0);
            }
        s.push_back(tmqi(noisy, hdr).s);
    }
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] < s[i - 1]);
}

TEST_CASE("tmqi: fusion of the full stack beats the darkest exposure") {
    const RgbImage hdr = make_scene(1, 128, 128);
    const auto stack = generate_stack(hdr);
    const RgbImage fused = fuse(stack.images);
    CHECK(tmqi(fused, hdr).q > tmqi(stack.images.front(), hdr).q);
}

TEST_CASE("evaluate bundles the metrics") {
    const RgbImage hdr = make_scene(0, 48, 48);
    const RgbImage img = generate_exposure(hdr, 0.0);
    const auto r = evaluate(img, hdr);
    CHECK(r.mean_dh == doctest::Approx(mean_hue_difference(img, hdr)));
    CHECK(r.tmqi_q == doctest::Approx(tmqi(img, hdr).q));
    CHECK_FALSE(r.crf_mse.has_value());
}

}  // TEST_SUITE
