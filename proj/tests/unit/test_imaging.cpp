#include "photofx/error.hpp"
#include "photofx/imaging.hpp"

#include "oracles.hpp"
#include "synth.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace photofx;
using testsupport::TempDir;

namespace fs = std::filesystem;

TEST_SUITE("imaging") {

TEST_CASE("frame validation rejects small, out-of-range and mismatched data") {
    CHECK_NOTHROW(validate(Frame(2, 2, 0.5f)));
    CHECK_THROWS_AS(validate(Frame(1, 4)), Error);
    Frame bad(3, 3, 0.5f);
    bad.at(1, 1, 2) = 1.5f;
    CHECK_THROWS_AS(validate(bad), Error);
    VideoClip clip{{Frame(4, 4), Frame(4, 3)}};
    try {
        validate(clip);
        FAIL("expected a validation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Validation);
        CHECK(std::string(e.what()).find("frame 1") != std::string::npos);
    }
    CHECK_THROWS_AS(validate(VideoClip{}), Error);
    CHECK_THROWS_AS(Frame(2, 2, std::vector<float>(5)), Error);
}

TEST_CASE("quantization rounds half up and clamps") {
    CHECK(quantize_u8(1.0f) == 255);
    CHECK(quantize_u8(0.0f) == 0);
    CHECK(quantize_u8(0.5f) == 128);
    CHECK(quantize_u8(1.2f) == 255);
    CHECK(quantize_u8(-0.3f) == 0);
    CHECK(quantize_u8(127.49f / 255.0f) == 127);
    for (int v = 0; v < 256; ++v) CHECK(quantize_u8(static_cast<float>(v / 255.0)) == v);
}

TEST_CASE("grayscale uses Rec.601 weights") {
    CHECK(to_grayscale(testsupport::uniform_frame(2, 2, 1, 1, 1)).at(0, 0) == doctest::Approx(1.0));
    CHECK(to_grayscale(testsupport::uniform_frame(2, 2, 0, 0, 0)).at(1, 1) == 0.0f);
    CHECK(to_grayscale(testsupport::uniform_frame(2, 2, 1, 0, 0)).at(0, 1) == doctest::Approx(0.299).epsilon(1e-6));
    CHECK(to_grayscale(testsupport::uniform_frame(2, 2, 0, 1, 0)).at(0, 1) == doctest::Approx(0.587).epsilon(1e-6));
    CHECK(to_grayscale(testsupport::uniform_frame(2, 2, 0, 0, 1)).at(0, 1) == doctest::Approx(0.114).epsilon(1e-6));
    // Gray input: equals the channel value.
    const Raster g = to_grayscale(testsupport::uniform_frame(3, 3, 0.3f, 0.3f, 0.3f));
    for (float v : g.values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("bilinear resize") {
    SUBCASE("constant stays constant") {
        const Frame c = testsupport::uniform_frame(7, 5, 0.5f, 0.5f, 0.5f);
        for (auto [w, h] : {std::pair{3, 2}, std::pair{16, 11}, std::pair{7, 9}}) {
            const Frame r = resize_bilinear(c, w, h);
            for (float v : r.data()) CHECK(v == doctest::Approx(0.5).epsilon(1e-7));
        }
    }
    SUBCASE("identity") {
        const Frame f = testsupport::random_frame(9, 6, 3);
        CHECK(testsupport::max_abs_diff(resize_bilinear(f, 9, 6), f) <= 1e-6);
    }
    SUBCASE("2x2 checkerboard to 4x4 matches the loop oracle") {
        Frame board(2, 2);
        for (int c = 0; c < 3; ++c) {
            board.at(0, 0, c) = 1.0f;
            board.at(1, 1, c) = 1.0f;
        }
        const Frame got = resize_bilinear(board, 4, 4);
        CHECK(testsupport::max_abs_diff(got, oracle::bilinear(board, 4, 4)) <= 1e-6);
        // Hand values: outer samples clamp to the source pixels, inner ones mix 3:1.
        CHECK(got.at(0, 0, 0) == doctest::Approx(1.0));
        CHECK(got.at(1, 0, 0) == doctest::Approx(0.75));
        CHECK(got.at(1, 1, 0) == doctest::Approx(0.625));
    }
    SUBCASE("random sizes match the oracle and stay within the input range") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const Frame f = testsupport::random_frame(5 + static_cast<int>(s), 4 + static_cast<int>(s % 3), s);
            const int w = 3 + static_cast<int>(s * 7 % 17), h = 2 + static_cast<int>(s * 5 % 13);
            const Frame got = resize_bilinear(f, w, h);
            CHECK(testsupport::max_abs_diff(got, oracle::bilinear(f, w, h)) <= 1e-6);
            const auto [lo, hi] = std::minmax_element(f.data().begin(), f.data().end());
            for (float v : got.data()) {
                CHECK(v >= *lo);
                CHECK(v <= *hi);
            }
        }
    }
    CHECK_THROWS_AS(resize_bilinear(Frame(4, 4), 1, 4), Error);
}

TEST_CASE("nearest resize keeps values from the source") {
    Raster r(2, 2, std::vector<float>{0.1f, 0.2f, 0.3f, 0.4f});
    const Raster up = resize_nearest(r, 4, 4);
    CHECK(up.at(0, 0) == 0.1f);
    CHECK(up.at(3, 0) == 0.2f);
    CHECK(up.at(0, 3) == 0.3f);
    CHECK(up.at(3, 3) == 0.4f);
}

TEST_CASE("centre crop offsets") {
    Frame f(6, 6);
    for (int y = 0; y < 6; ++y) {
        for (int x = 0; x < 6; ++x) f.at(x, y, 0) = static_cast<float>(10 * y + x) / 100.0f;
    }
    const Frame c = center_crop(f, 4, 4);
    CHECK(c.at(0, 0, 0) == f.at(1, 1, 0));
    CHECK(c.at(3, 3, 0) == f.at(4, 4, 0));
    CHECK(center_crop(f, 6, 6) == f);

    Frame g(5, 5);
    for (int y = 0; y < 5; ++y) {
        for (int x = 0; x < 5; ++x) g.at(x, y, 1) = static_cast<float>(10 * y + x) / 100.0f;
    }
    const Frame d = center_crop(g, 4, 4);
    CHECK(d.at(0, 0, 1) == g.at(0, 0, 1));  // extra margin goes right/bottom
    CHECK(d.at(3, 3, 1) == g.at(3, 3, 1));
    CHECK_THROWS_AS(center_crop(g, 6, 4), Error);
    CHECK_THROWS_AS(center_crop(g, 1, 4), Error);
}

TEST_CASE("clip save/load round-trip is byte exact") {
    TempDir tmp;
    VideoClip clip;
    for (std::uint64_t i = 0; i < 3; ++i) clip.frames.push_back(testsupport::random_frame(7, 5, i));
    save_clip(clip, tmp / "clip");
    CHECK(fs::exists(tmp / "clip" / "000000.png"));
    CHECK(fs::exists(tmp / "clip" / "000002.png"));
    const VideoClip back = load_clip(tmp / "clip");
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(back.frames[i] == clip.frames[i]);

    // Saving again produces identical files.
    save_clip(back, tmp / "again");
    CHECK(testsupport::same_tree(tmp / "clip", tmp / "again"));
}

TEST_CASE("8-bit values load as v / 255") {
    TempDir tmp;
    Frame f(2, 2, 0.0f);
    f.at(0, 0, 0) = 1.0f;
    f.at(1, 0, 0) = 128.0f / 255.0f;
    save_frame(f, tmp / "000000.png");
    const Frame back = load_frame(tmp / "000000.png");
    CHECK(back.at(0, 0, 0) == 1.0f);
    CHECK(back.at(1, 0, 0) == doctest::Approx(0.50196).epsilon(1e-5));
    CHECK(quantize_u8(back.at(1, 0, 0)) == 128);
}

TEST_CASE("load_clip reports gaps and mismatched frames") {
    TempDir tmp;
    save_frame(Frame(4, 4, 0.2f), frame_path(tmp.path(), 0));
    save_frame(Frame(4, 4, 0.2f), frame_path(tmp.path(), 2));
    try {
        load_clip(tmp.path());
        FAIL("expected a gap error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("missing index 1") != std::string::npos);
    }
    save_frame(Frame(5, 4, 0.2f), frame_path(tmp.path(), 1));
    try {
        load_clip(tmp.path());
        FAIL("expected a size error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("000001.png") != std::string::npos);
    }
    CHECK_THROWS_AS(load_clip(tmp / "nope"), Error);
    TempDir empty;
    CHECK_THROWS_AS(load_clip(empty.path()), Error);
    std::ofstream(empty / "000000.png") << "not a png";
    CHECK_THROWS_AS(load_clip(empty.path()), Error);
}

TEST_CASE("disparity maps are 16-bit and normalized per clip") {
    TempDir tmp;
    DisparityMap a{Raster(3, 2, std::vector<float>{0.25f, 0.5f, 0.75f, 0.25f, 0.5f, 0.75f})};
    DisparityMap b{Raster(3, 2, 0.5f)};
    save_disparities({a, b}, tmp.path());
    const auto raw = load_disparities(tmp.path(), false);
    REQUIRE(raw.size() == 2);
    CHECK(raw[0].at(0, 0) == doctest::Approx(0.25).epsilon(1e-4));
    const auto norm = load_disparities(tmp.path(), true);
    CHECK(norm[0].at(0, 0) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(norm[0].at(2, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(norm[1].at(1, 1) == doctest::Approx(0.5).epsilon(1e-4));
    CHECK_THROWS_AS(validate(DisparityMap{Raster(3, 3, 1.5f)}), Error);
}

TEST_CASE("slice copies a range") {
    VideoClip clip;
    for (int i = 0; i < 5; ++i) clip.frames.push_back(Frame(2, 2, static_cast<float>(i) / 10.0f));
    const VideoClip s = slice(clip, 1, 3);
    REQUIRE(s.size() == 2);
    CHECK(s.frames[0] == clip.frames[1]);
    CHECK_THROWS_AS(slice(clip, 3, 7), Error);
}

}
