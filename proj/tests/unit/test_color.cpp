#include "photofx/color.hpp"
#include "photofx/error.hpp"

#include "synth.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace photofx;

namespace {

// Band formulas evaluated directly, without clamping.
double red_high(double t) { return 329.07 * std::pow(t - 60, -0.1933); }
double green_low(double t) { return 99.47 * std::log(t) - 161.12; }
double green_high(double t) { return 288.12 * std::pow(t - 60, -0.1155); }
double blue_low(double t) { return 138.52 * std::log(t - 10) - 305.04; }

double rb_ratio(const Frame& f) {
    double r = 0, b = 0;
    for (std::size_t i = 0; i < f.pixel_count(); ++i) {
        r += f.data()[3 * i];
        b += f.data()[3 * i + 2];
    }
    return r / b;
}

}  // namespace

TEST_SUITE("color") {

TEST_CASE("control to Kelvin") {
    CHECK(temp_from_control(0.0) == 6500.0);
    CHECK(temp_from_control(-1.0) == 2000.0);
    CHECK(temp_from_control(1.0) == 10000.0);
    CHECK(temp_from_control(-0.5) == 4250.0);
    CHECK(temp_from_control(0.5) == 8250.0);
    CHECK_THROWS_AS(temp_from_control(1.1), Error);
}

TEST_CASE("Kelvin anchors") {
    const auto a = kelvin_to_rgb(6600);
    CHECK(a[0] == 255.0);
    CHECK(a[1] == 255.0);
    CHECK(a[2] == doctest::Approx(252.5).epsilon(0.5 / 252.5));
    CHECK(a[2] == doctest::Approx(blue_low(66)));

    const auto b = kelvin_to_rgb(2000);
    CHECK(b[0] == 255.0);
    CHECK(std::abs(b[1] - 136.9) <= 0.5);
    CHECK(std::abs(b[2] - 13.9) <= 0.5);

    const auto c = kelvin_to_rgb(10000);
    CHECK(std::abs(c[0] - 161.3) <= 0.5);
    CHECK(std::abs(c[1] - 188.2) <= 0.5);
    CHECK(c[2] == 255.0);

    const auto mid = kelvin_to_rgb(7700);  // blend band
    CHECK(mid[0] == doctest::Approx(0.5 * (255 + red_high(77))));
    CHECK(mid[1] == doctest::Approx(0.5 * (green_high(77) + green_low(77))));
    CHECK(mid[2] == doctest::Approx(std::min(255.0, 0.5 * (blue_low(77) + 255))));

    for (double k = 2000; k <= 10000; k += 250) {
        for (double v : kelvin_to_rgb(k)) {
            CHECK(v >= 0.0);
            CHECK(v <= 255.0);
        }
    }
    CHECK_THROWS_AS(kelvin_to_rgb(1999), Error);
    CHECK_THROWS_AS(kelvin_to_rgb(10001), Error);
}

// The stated continuity bound does not hold for these band formulas: the
// blend band starts about 11 below the lower band in R and G, and R drops
// by about 41 entering the upper band. Kept as an expected failure.
TEST_CASE("band edges are continuous within 2" * doctest::should_fail()) {
    const double eps = 1e-9;
    for (double edge : {6600.0, 8800.0}) {
        const auto lo = kelvin_to_rgb(edge);
        const auto hi = kelvin_to_rgb(edge + eps);
        for (int c = 0; c < 3; ++c) CHECK(std::abs(lo[c] - hi[c]) <= 2.0);
    }
}

TEST_CASE("band edge jumps match the formulas") {
    const double eps = 1e-9;
    const auto below66 = kelvin_to_rgb(6600), above66 = kelvin_to_rgb(6600 + eps);
    CHECK(below66[0] - above66[0] == doctest::Approx(255 - 0.5 * (255 + red_high(66))).epsilon(1e-6));
    CHECK(below66[0] - above66[0] == doctest::Approx(11.1).epsilon(0.01));
    CHECK(std::abs(below66[1] - above66[1]) > 2.0);
    CHECK(std::abs(below66[2] - above66[2]) < 2.0);

    const auto below88 = kelvin_to_rgb(8800), above88 = kelvin_to_rgb(8800 + eps);
    CHECK(below88[0] - above88[0] == doctest::Approx(0.5 * (255 - red_high(88))).epsilon(1e-6));
    CHECK(below88[0] - above88[0] == doctest::Approx(41.1).epsilon(0.01));
}

TEST_CASE("gains and application") {
    const Frame f = testsupport::random_frame(10, 8, 3);
    CHECK(apply_color_temperature(f, 0.0) == f);
    for (double g : color_gains(0.0)) CHECK(g == 1.0);

    const Frame white = testsupport::uniform_frame(2, 2, 1, 1, 1);
    const Frame warm = apply_color_temperature(white, -1.0);
    CHECK(warm.at(0, 0, 0) == 1.0f);
    const auto base = kelvin_to_rgb(6500), cold_end = kelvin_to_rgb(2000);
    CHECK(warm.at(0, 0, 1) == doctest::Approx(cold_end[1] / base[1]).epsilon(1e-6));
    CHECK(warm.at(0, 0, 2) == doctest::Approx(cold_end[2] / base[2]).epsilon(1e-6));
    CHECK(rb_ratio(warm) > rb_ratio(white));

    const Frame cool = apply_color_temperature(white, 1.0);
    CHECK(cool.at(1, 1, 2) == 1.0f);
    CHECK(cool.at(1, 1, 0) < 1.0f);
    CHECK(1.0 / rb_ratio(cool) > 1.0 / rb_ratio(white));
}

TEST_CASE("R/B ratio does not increase with T") {
    const testsupport::Texture tex(256, 9);
    const Frame photo = testsupport::render_shift(tex, 64, 48, 30, 30);
    double prev = 1e9;
    for (int i = 0; i <= 8; ++i) {
        const double T = -1.0 + 0.25 * i;
        const double r = rb_ratio(apply_color_temperature(photo, T));
        CHECK(r <= prev);
        prev = r;
    }
}

TEST_CASE("config validation") {
    ColorTempConfig c;
    c.temp_base = 1500;
    CHECK_THROWS_AS(validate(c), Error);
    c = {};
    c.temp_max = 12000;
    CHECK_THROWS_AS(validate(c), Error);
}

}
