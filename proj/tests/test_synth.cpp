#include <doctest.h>

#include "helpers.hpp"
#include "huefuse/color_core.hpp"
#include "huefuse/error.hpp"
#include "huefuse/synth.hpp"

using namespace huefuse;

TEST_SUITE("synth") {

TEST_CASE("v = 0 exposure has key 0.18 before clipping") {
    const RgbImage hdr = make_scene(1, 128, 128);
    const RgbImage x = expose(hdr, 0.0);
    CHECK(geometric_mean(luminance(x)) == doctest::Approx(0.18).epsilon(1e-6));
}

TEST_CASE("two stops is exactly four times brighter") {
    const RgbImage hdr = make_scene(2, 64, 64);
    const RgbImage x0 = expose(hdr, 0.0), x2 = expose(hdr, 2.0);
    for (std::size_t i = 0; i < x0.size(); ++i)
        for (int c = 0; c < 3; ++c) REQUIRE(x2[i][c] == 4.0 * x0[i][c]);
}

TEST_CASE("display encoding of 0.25") {
    RgbImage x(1, 1, Transfer::Linear, {0.25, 0.25, 0.25});
    const RgbImage d = camera_encode(x, 2.2);
    CHECK(std::round(std::pow(0.25, 1 / 2.2) * 255.0) == 136.0);
    CHECK(d.at(0, 0).r == 136.0 / 255.0);
    CHECK(d.transfer() == Transfer::Display);
}

TEST_CASE("encoding clips and rounds half away from zero") {
    RgbImage x(3, 1, Transfer::Linear);
    x.at(0, 0) = {-0.5, 1.5, 0.0};
    // 127.5 / 255 under gamma 1 sits exactly on a rounding boundary
    x.at(1, 0) = {0.5, 0.5, 0.5};
    x.at(2, 0) = {1.0, 1.0, 1.0};
    const RgbImage d = camera_encode(x, 1.0);
    CHECK(d.at(0, 0).r == 0.0);
    CHECK(d.at(0, 0).g == 1.0);
    CHECK(d.at(1, 0).r == 128.0 / 255.0);
    CHECK(d.at(2, 0).b == 1.0);
}

TEST_CASE("stack generation") {
    const RgbImage hdr = make_scene(3, 96, 96);
    const ExposureStack st = generate_stack(hdr);
    REQUIRE(st.size() == 5);
    double prev = -1.0;
    for (std::size_t i = 0; i < st.size(); ++i) {
        CHECK(st.times[i] == std::exp2(-4.0 + 2.0 * static_cast<double>(i)));
        double mean = 0.0;
        for (const auto& p : st.images[i].pixels()) mean += luminance(p);
        CHECK(mean > prev);
        prev = mean;
        for (const auto& p : st.images[i].pixels())
            for (int c = 0; c < 3; ++c) {
                const double code = p[c] * 255.0;
                REQUIRE(std::abs(code - std::round(code)) < 1e-9);
            }
    }
    SynthConfig single;
    single.ev_list = {0.0};
    const ExposureStack one = generate_stack(hdr, single);
    CHECK(one.size() == 1);
    CHECK(one.times[0] == 1.0);
}

TEST_CASE("bright-biased stacks clip") {
    SynthConfig sc;
    sc.ev_list = {0.0, 2.0, 4.0};
    const ExposureStack st = generate_stack(make_scene(4, 96, 96), sc);
    std::size_t white = 0;
    for (const auto& p : st.images.back().pixels()) white += (p.r == 1.0 && p.g == 1.0 && p.b == 1.0);
    CHECK(white > st.images.back().size() / 4);
}

TEST_CASE("pre-quantization display values are monotone in exposure") {
    const RgbImage hdr = make_scene(5, 64, 64);
    const RgbImage a = camera_encode(expose(hdr, -1.0), 2.2, false);
    const RgbImage b = camera_encode(expose(hdr, 1.5), 2.2, false);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int c = 0; c < 3; ++c) REQUIRE(a[i][c] <= b[i][c]);
}

TEST_CASE("quantization error is at most half a code") {
    const RgbImage hdr = make_scene(6, 64, 64);
    const RgbImage x = expose(hdr, 0.5);
    const RgbImage q = camera_encode(x, 2.2), u = camera_encode(x, 2.2, false);
    CHECK(testing::max_abs_diff(q, u) <= 1.0 / 510.0 + 1e-15);
}

TEST_CASE("gamma moves the encoded hue away from the linear hue") {
    const Rgb x{0.2, 0.1, 0.05};
    const RgbImage lin(1, 1, Transfer::Linear, x);
    const auto c_lin = max_saturated_color(x);
    const auto c_enc = max_saturated_color(camera_encode(lin, 2.2, false).at(0, 0));
    REQUIRE(c_lin);
    REQUIRE(c_enc);
    // linear c = (1, 1/3, 0); encoded middle channel (0.5^(1/2.2) - 0.25^(1/2.2)) / (1 - 0.25^(1/2.2))
    const double a = std::pow(0.5, 1 / 2.2), b = std::pow(0.25, 1 / 2.2);
    CHECK(c_lin->g == doctest::Approx(1.0 / 3.0));
    CHECK(c_enc->g == doctest::Approx((a - b) / (1.0 - b)));
    CHECK(std::abs(c_enc->g - c_lin->g) > 0.05);
}

TEST_CASE("clipping changes the encoded hue across exposures") {
    const Rgb x{0.2, 0.1, 0.05};
    const auto c1 = max_saturated_color(camera_encode(RgbImage(1, 1, Transfer::Linear, x), 2.2, false).at(0, 0));
    const auto c8 = max_saturated_color(
        camera_encode(RgbImage(1, 1, Transfer::Linear, 8.0 * x), 2.2, false).at(0, 0));  // red clips
    REQUIRE(c1);
    REQUIRE(c8);
    CHECK(std::abs(c1->g - c8->g) > 0.05);
}

TEST_CASE("unclipped pixel: encoded hue differs between exposures" * doctest::may_fail()) {
    // A pure power law is homogeneous, so without clipping or rounding the
    // encoded hue is the same at every exposure.
    const Rgb x{0.2, 0.1, 0.05};
    const auto c1 = max_saturated_color(camera_encode(RgbImage(1, 1, Transfer::Linear, x), 2.2, false).at(0, 0));
    const auto c4 = max_saturated_color(
        camera_encode(RgbImage(1, 1, Transfer::Linear, 4.0 * x), 2.2, false).at(0, 0));
    REQUIRE(c1);
    REQUIRE(c4);
    CHECK(std::abs(c1->g - c4->g) > 1e-6);
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(key_scale(RgbImage(4, 4, Transfer::Linear)), InvalidArgument);
    SynthConfig bad;
    bad.ev_list = {};
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    bad.ev_list = {0.0};
    bad.gamma = 0.0;
    CHECK_THROWS_AS(generate_stack(make_scene(1, 8, 8), bad), InvalidArgument);
}

TEST_CASE("procedural scenes are deterministic, positive and high dynamic range") {
    const RgbImage a = make_scene(9, 64, 48), b = make_scene(9, 64, 48), c = make_scene(10, 64, 48);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(a.width() == 64);
    CHECK(a.height() == 48);
    double lo = 1e300, hi = 0.0;
    for (const auto& p : a.pixels()) {
        const double l = luminance(p);
        CHECK(l > 0.0);
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    CHECK(hi / lo > 100.0);
}

}  // TEST_SUITE
