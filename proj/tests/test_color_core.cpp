#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "huefuse/color_core.hpp"
#include "huefuse/error.hpp"

using namespace huefuse;

namespace {

// Hue plane coordinates evaluated straight from their definitions.
struct Oracle {
    double a_w, a_c, a_k;
    Rgb c;
};
Oracle oracle(const Rgb& p) {
    const double mx = std::max({p.r, p.g, p.b}), mn = std::min({p.r, p.g, p.b});
    return {mn, mx - mn, 1.0 - mx, {(p.r - mn) / (mx - mn), (p.g - mn) / (mx - mn), (p.b - mn) / (mx - mn)}};
}

int argmax(const Rgb& p) { return p.r >= p.g && p.r >= p.b ? 0 : (p.g >= p.b ? 1 : 2); }
int argmin(const Rgb& p) { return p.r <= p.g && p.r <= p.b ? 0 : (p.g <= p.b ? 1 : 2); }

}  // namespace

TEST_SUITE("color-core") {

TEST_CASE("decompose worked example") {
    const auto h = decompose({0.5, 0.25, 0.25});
    CHECK(h.a_w == doctest::Approx(0.25));
    CHECK(h.a_c == doctest::Approx(0.25));
    CHECK(h.a_k == doctest::Approx(0.5));
    CHECK_FALSE(h.achromatic);
    CHECK(h.c.r == doctest::Approx(1.0));
    CHECK(h.c.g == doctest::Approx(0.0));
    CHECK(h.c.b == doctest::Approx(0.0));
}

TEST_CASE("white and black vertices are achromatic") {
    const auto w = decompose({1, 1, 1});
    CHECK(w.achromatic);
    CHECK(w.a_w == 1.0);
    CHECK(w.a_c == 0.0);
    CHECK(w.a_k == 0.0);
    const auto k = decompose({0, 0, 0});
    CHECK(k.achromatic);
    CHECK(k.a_w == 0.0);
    CHECK(k.a_c == 0.0);
    CHECK(k.a_k == 1.0);
}

TEST_CASE("reconstruct worked examples") {
    HuePlaneCoords h;
    h.a_w = 0.25;
    h.a_k = 0.5;
    h.a_c = 0.25;
    h.c = {1, 0, 0};
    h.achromatic = false;
    const Rgb p = reconstruct(h);
    CHECK(p.r == doctest::Approx(0.5));
    CHECK(p.g == doctest::Approx(0.25));
    CHECK(p.b == doctest::Approx(0.25));

    HuePlaneCoords white;
    white.a_w = 1;
    white.a_k = 0;
    white.a_c = 0;
    white.c = {0.3, 0.9, 0.1};
    CHECK(reconstruct(white) == Rgb{1, 1, 1});
}

TEST_CASE("decompose matches the closed-form oracle and round-trips") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const Rgb p{u(rng), u(rng), u(rng)};
        const auto h = decompose(p);
        const auto o = oracle(p);
        REQUIRE(h.a_w == doctest::Approx(o.a_w).epsilon(1e-12));
        REQUIRE(h.a_c == doctest::Approx(o.a_c).epsilon(1e-12));
        REQUIRE(std::abs(h.a_k - o.a_k) < 1e-12);
        const Rgb r = reconstruct(h);
        for (int ch = 0; ch < 3; ++ch) REQUIRE(std::abs(r[ch] - p[ch]) < 1e-7);
        // simplex: exact in the order the coefficients are defined
        REQUIRE((h.a_w + h.a_c) + h.a_k == 1.0);
        REQUIRE(h.a_w >= 0.0);
        REQUIRE(h.a_c >= 0.0);
        REQUIRE(h.a_k >= 0.0);
        REQUIRE(h.a_w <= 1.0);
        // max-saturated normalization
        REQUIRE(std::min({h.c.r, h.c.g, h.c.b}) == 0.0);
        REQUIRE(std::max({h.c.r, h.c.g, h.c.b}) == 1.0);
        REQUIRE(argmax(h.c) == argmax(p));
        REQUIRE(argmin(h.c) == argmin(p));
    }
}

TEST_CASE("max_saturated_color is empty below the achromatic threshold") {
    CHECK_FALSE(max_saturated_color({0.4, 0.4, 0.4}).has_value());
    CHECK_FALSE(max_saturated_color({0.4, 0.4 + 0.5e-6, 0.4}).has_value());
    CHECK(max_saturated_color({0.4, 0.4 + 2e-6, 0.4}).has_value());
}

TEST_CASE("correct_hue worked example") {
    const Rgb out = correct_hue({0.5, 0.25, 0.25}, {2.0, 2.0, 6.0});
    CHECK(out.r == doctest::Approx(0.25));
    CHECK(out.g == doctest::Approx(0.25));
    CHECK(out.b == doctest::Approx(0.5));
}

TEST_CASE("correct_hue pass-through cases") {
    SUBCASE("gray fused") {
        const Rgb g{0.3, 0.3, 0.3};
        CHECK(correct_hue(g, {5.0, 1.0, 0.1}) == g);
    }
    SUBCASE("achromatic reference") {
        const Rgb f{0.6, 0.2, 0.4};
        CHECK(correct_hue(f, {3.0, 3.0, 3.0}) == f);
        CHECK(correct_hue(f, {0.0, 0.0, 0.0}) == f);
    }
    SUBCASE("reference with the fused hue") {
        const Rgb f{0.6, 0.2, 0.4};
        const Rgb out = correct_hue(f, {12.0, 4.0, 8.0});
        for (int c = 0; c < 3; ++c) CHECK(out[c] == doctest::Approx(f[c]).epsilon(1e-12));
    }
}

TEST_CASE("correct_hue invariants over random pixels") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> r(0.0, 50.0);
    for (int i = 0; i < 100000; ++i) {
        const Rgb f{u(rng), u(rng), u(rng)};
        const Rgb ref{r(rng), r(rng), r(rng)};
        const Rgb out = correct_hue(f, ref);
        for (int c = 0; c < 3; ++c) REQUIRE((out[c] >= 0.0 && out[c] <= 1.0));
        const auto cf = max_saturated_color(f);
        const auto cr = max_saturated_color(ref);
        if (!cf || !cr) continue;
        const auto co = max_saturated_color(out);
        REQUIRE(co.has_value());
        for (int c = 0; c < 3; ++c) REQUIRE(std::abs((*co)[c] - (*cr)[c]) < 1e-6);
        const auto hf = decompose(f), ho = decompose(out);
        REQUIRE(std::abs(hf.a_w - ho.a_w) < 1e-7);
        REQUIRE(std::abs(hf.a_c - ho.a_c) < 1e-7);
        REQUIRE(std::abs(hf.a_k - ho.a_k) < 1e-7);
        REQUIRE(max_channel(out) == doctest::Approx(max_channel(f)).epsilon(1e-12));
        REQUIRE(min_channel(out) == doctest::Approx(min_channel(f)).epsilon(1e-12));
    }
}

TEST_CASE("correct_hue_image") {
    SUBCASE("1x1 reduces to correct_hue") {
        RgbImage f(1, 1), h(1, 1, Transfer::Linear);
        f.at(0, 0) = {0.5, 0.25, 0.25};
        h.at(0, 0) = {2.0, 2.0, 6.0};
        const auto out = correct_hue_image(f, h);
        CHECK(out.at(0, 0).b == doctest::Approx(0.5));
        CHECK(out.transfer() == Transfer::Display);
    }
    SUBCASE("reference with the fused hue field leaves fused unchanged") {
        const RgbImage f = testing::random_image(17, 9, 3);
        RgbImage h = f;
        for (auto& p : h.pixels()) p = 7.5 * p;
        CHECK(testing::max_abs_diff(correct_hue_image(f, h), f) < 1e-12);
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(correct_hue_image(RgbImage(4, 4), RgbImage(4, 5)), DimensionMismatch);
    }
}

TEST_CASE("luminance weights") {
    CHECK(luminance(Rgb{1, 1, 1}) == doctest::Approx(1.0));
    CHECK(luminance(Rgb{1, 0, 0}) == doctest::Approx(0.2126));
    CHECK(luminance(Rgb{0, 1, 0}) == doctest::Approx(0.7152));
    CHECK(luminance(Rgb{0, 0, 1}) == doctest::Approx(0.0722));
}

TEST_CASE("geometric_mean") {
    SUBCASE("constant plane") {
        const LuminancePlane p(8, 8, 0.3);
        CHECK(geometric_mean(p) == doctest::Approx(0.3).epsilon(1e-5));
    }
    SUBCASE("values {1, 4}") {
        LuminancePlane p(2, 1);
        p[0] = 1.0;
        p[1] = 4.0;
        CHECK(geometric_mean(p, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(geometric_mean(p) == doctest::Approx(2.0).epsilon(1e-6));
    }
    SUBCASE("homogeneity") {
        LuminancePlane p = testing::random_plane(16, 16, 9);
        LuminancePlane q = p;
        for (auto& v : q.pixels()) v *= 3.0;
        CHECK(geometric_mean(q, 0.0) == doctest::Approx(3.0 * geometric_mean(p, 0.0)).epsilon(1e-12));
    }
    SUBCASE("mask selects pixels") {
        LuminancePlane p(2, 2);
        p[0] = 1.0;
        p[1] = 100.0;
        p[2] = 9.0;
        p[3] = 100.0;
        Grid<unsigned char> m(2, 2, 0);
        m[0] = m[2] = 1;
        CHECK(geometric_mean(p, m, 0.0) == doctest::Approx(3.0));
    }
    SUBCASE("empty mask") {
        CHECK_THROWS_AS(geometric_mean(LuminancePlane(2, 2, 1.0), Grid<unsigned char>(2, 2, 0)), InvalidArgument);
    }
}

}  // TEST_SUITE
