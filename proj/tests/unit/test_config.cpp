#include "photofx/config.hpp"
#include "photofx/error.hpp"

#include "synth.hpp"

#include <doctest.h>

#include <fstream>

using namespace photofx;
using nlohmann::json;

TEST_SUITE("config") {

TEST_CASE("sha256 test vectors") {
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("defaults survive a JSON round trip") {
    const GlobalConfig def;
    const GlobalConfig back = config_from_json(to_json_value(def));
    CHECK(to_json_value(back) == to_json_value(def));
    CHECK(effect_config_digest(back) == effect_config_digest(def));
    CHECK(config_from_json(json::object()).sensor.epsilon == def.sensor.epsilon);
}

TEST_CASE("partial documents override only the named keys") {
    const GlobalConfig c = config_from_json(json::parse(R"({"sensor": {"epsilon": 2}, "bokeh": {"layers": 4},
        "optics": {"mode": "pixel-diag"}, "curation": {"w_small": 5}, "seed": 9})"));
    CHECK(c.sensor.epsilon == 2.0);
    CHECK(c.sensor.fwc == SensorConfig{}.fwc);
    CHECK(c.bokeh.layers == 4);
    CHECK(c.optics.mode == DiagonalMode::PixelDiagonal);
    CHECK(c.curation.w_small == 5);
    CHECK(c.seed == 9);
}

TEST_CASE("bad documents are rejected") {
    const auto kind = [](const char* text) {
        try {
            config_from_json(json::parse(text));
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;  // sentinel: nothing thrown
    };
    CHECK(kind(R"({"sensor": {"epsilonn": 2}})") == ErrorKind::Parse);
    CHECK(kind(R"({"lens": {}})") == ErrorKind::Parse);
    CHECK(kind(R"({"sensor": {"fwc": "big"}})") == ErrorKind::Parse);
    CHECK(kind(R"({"optics": {"mode": "diag"}})") == ErrorKind::Parse);
    CHECK(kind(R"([1, 2])") == ErrorKind::Parse);
    CHECK(kind(R"({"bokeh": {"layers": 0}})") == ErrorKind::Validation);
    CHECK(kind(R"({"curation": {"min_len": 200}})") == ErrorKind::Validation);
    CHECK(kind(R"({"optics": {"f_max": 10}})") == ErrorKind::Validation);
}

TEST_CASE("files") {
    testsupport::TempDir tmp;
    std::ofstream(tmp / "ok.json") << R"({"color": {"temp_base": 6000}})";
    CHECK(load_config((tmp / "ok.json").string()).color.temp_base == 6000.0);
    std::ofstream(tmp / "bad.json") << "{\"color\": ";
    CHECK_THROWS_AS(load_config((tmp / "bad.json").string()), Error);
    CHECK_THROWS_AS(load_config((tmp / "none.json").string()), Error);
}

TEST_CASE("digest covers effect settings only") {
    const GlobalConfig base;
    GlobalConfig c = base;
    c.curation.theta_small = 3.0;
    c.vision.ratio = 0.6;
    c.seed = 77;
    CHECK(effect_config_digest(c) == effect_config_digest(base));
    c = base;
    c.sensor.epsilon = 2.5;
    CHECK(effect_config_digest(c) != effect_config_digest(base));
    c = base;
    c.pairs.bokeh_after_zoom = true;
    CHECK(effect_config_digest(c) != effect_config_digest(base));
    CHECK(effect_config_digest(base).size() == 64);
}

}
