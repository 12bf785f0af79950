#include "photofx/error.hpp"
#include "photofx/exposure.hpp"

#include "synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace photofx;

TEST_SUITE("exposure") {

TEST_CASE("multiplier") {
    CHECK(exposure_multiplier(0.0, 3.0) == 1.0);
    CHECK(exposure_multiplier(1.0, 1.0) == 2.0);
    CHECK(exposure_multiplier(-1.0, 2.0) == 0.25);
    CHECK(exposure_multiplier(0.5, 3.0) == std::pow(2.0, 1.5));
    CHECK_THROWS_AS(exposure_multiplier(1.5, 1.0), Error);
}

TEST_CASE("deterministic path") {
    const Frame f = testsupport::random_frame(9, 7, 1);
    CHECK(apply_exposure(f, 0.0) == f);

    SensorConfig unit;
    unit.epsilon = 1.0;
    const Frame c128 = testsupport::uniform_frame(2, 2, 128.0f / 255, 128.0f / 255, 128.0f / 255);
    const Frame bright = apply_exposure(c128, 1.0, unit);
    CHECK(bright.at(0, 0, 0) == 1.0f);
    CHECK(quantize_u8(bright.at(1, 1, 2)) == 255);

    const Frame c100 = testsupport::uniform_frame(2, 2, 100.0f / 255, 100.0f / 255, 100.0f / 255);
    const Frame half = apply_exposure(c100, -1.0, unit);
    CHECK(half.at(0, 0, 0) == doctest::Approx(50.0 / 255).epsilon(1e-7));
    CHECK(quantize_u8(half.at(0, 0, 0)) == 50);
}

TEST_CASE("monotone in S and idempotent at saturation") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Frame f = testsupport::random_frame(8, 8, s);
        Frame prev = apply_exposure(f, -1.0);
        for (double S = -0.75; S <= 1.0; S += 0.25) {
            const Frame cur = apply_exposure(f, S);
            for (std::size_t i = 0; i < f.data().size(); ++i) CHECK(prev.data()[i] <= cur.data()[i]);
            prev = cur;
        }
    }
    const Frame white = testsupport::uniform_frame(3, 3, 1, 1, 1);
    CHECK(apply_exposure(apply_exposure(white, 1.0), 1.0) == apply_exposure(white, 1.0));
}

TEST_CASE("noisy path") {
    SensorConfig cfg;
    cfg.sigma_read = 0.0;
    SUBCASE("black stays black without read noise") {
        const Frame black(6, 6, 0.0f);
        CHECK(apply_exposure_noisy(black, 0.5, cfg, 1) == black);
    }
    SUBCASE("repeatable and keyed by frame index") {
        const Frame f = testsupport::random_frame(10, 10, 4);
        SensorConfig noisy;
        CHECK(apply_exposure_noisy(f, 0.2, noisy, 9, 3) == apply_exposure_noisy(f, 0.2, noisy, 9, 3));
        CHECK_FALSE(apply_exposure_noisy(f, 0.2, noisy, 9, 3) == apply_exposure_noisy(f, 0.2, noisy, 9, 4));
        CHECK_FALSE(apply_exposure_noisy(f, 0.2, noisy, 9, 3) == apply_exposure_noisy(f, 0.2, noisy, 10, 3));
    }
    SUBCASE("Poisson moments") {
        // 200 x 167 x 3 = 100200 samples at E_t = 0.5 fwc.
        const Frame gray(200, 167, 0.5f);
        const Frame out = apply_exposure_noisy(gray, 0.0, cfg, 2024);
        const double lambda = 0.5 * cfg.fwc;
        const auto n = static_cast<double>(out.data().size());
        double sum = 0, sq = 0;
        for (float v : out.data()) {
            const double e = std::round(static_cast<double>(v) * cfg.fwc);
            sum += e;
            sq += e * e;
        }
        const double mean = sum / n;
        const double var = (sq - n * mean * mean) / (n - 1);
        CHECK(std::abs(mean - lambda) <= 3.0 * std::sqrt(lambda / n));
        CHECK(std::abs(var - lambda) <= 0.05 * lambda);
    }
    SUBCASE("large wells converge to the deterministic path") {
        SensorConfig big = cfg;
        big.fwc = 1e6;
        const Frame f = testsupport::random_frame(40, 40, 5);
        const Frame det = apply_exposure(f, -0.3, big);
        const Frame noisy = apply_exposure_noisy(f, -0.3, big, 7);
        double a = 0, b = 0;
        for (std::size_t i = 0; i < f.data().size(); ++i) {
            a += det.data()[i];
            b += noisy.data()[i];
        }
        CHECK(std::abs(b - a) <= 0.01 * a);
    }
    SUBCASE("dark signal raises the mean") {
        SensorConfig dark = cfg;
        dark.mu_dark = 100.0;
        const Frame black(100, 100, 0.0f);
        const Frame out = apply_exposure_noisy(black, 0.0, dark, 3);
        double sum = 0;
        for (float v : out.data()) sum += v * dark.fwc;
        CHECK(sum / static_cast<double>(out.data().size()) == doctest::Approx(dark.qe * dark.mu_dark).epsilon(0.02));
    }
}

TEST_CASE("sensor validation") {
    SensorConfig c;
    c.fwc = 0;
    CHECK_THROWS_AS(validate(c), Error);
    c = {};
    c.epsilon = -1;
    CHECK_THROWS_AS(validate(c), Error);
    c = {};
    c.sigma_read = -0.1;
    CHECK_THROWS_AS(validate(c), Error);
    c = {};
    c.qe = 0;
    CHECK_THROWS_AS(validate(c), Error);
}

}
