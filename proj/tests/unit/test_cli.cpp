#include "photofx/imaging.hpp"
#include "photofx/pairs.hpp"

#include "synth.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

using namespace photofx;
using nlohmann::json;
using testsupport::TempDir;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const TempDir& tmp, const std::string& args) {
    static int counter = 0;
    const auto out = tmp / ("stdout" + std::to_string(counter));
    const auto err = tmp / ("stderr" + std::to_string(counter++));
    const std::string cmd = std::string("\"") + PHOTOFX_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, testsupport::read_file(out), testsupport::read_file(err)};
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

json last_json_line(const std::string& text) {
    std::istringstream in(text);
    std::string line, last;
    while (std::getline(in, line)) {
        if (!line.empty()) last = line;
    }
    return json::parse(last);
}

void write_scene(const TempDir& tmp, std::size_t frames = 3) {
    VideoClip clip;
    std::vector<DisparityMap> disp;
    for (std::size_t i = 0; i < frames; ++i) {
        clip.frames.push_back(testsupport::random_frame(40, 30, 10 + i));
        disp.push_back(testsupport::random_disparity(40, 30, 20 + i));
    }
    save_clip(clip, tmp / "src");
    save_disparities(disp, tmp / "disp");
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage") {
    TempDir tmp;
    CHECK(run(tmp, "--help").code == 0);
    const Run none = run(tmp, "");
    CHECK(none.code == 1);
    CHECK(json::parse(none.err)["error"] == "usage");
    CHECK(run(tmp, "simulate").code == 1);
    CHECK(run(tmp, "frobnicate").code == 1);
    CHECK(run(tmp, "--workers 0 attn-check").code == 1);
}

TEST_CASE("neutral simulate reproduces the input") {
    TempDir tmp;
    write_scene(tmp);
    const Run r = run(tmp, "simulate " + q(tmp / "src") + " " + q(tmp / "out") + " --exposure 0 --focus 0.3");
    REQUIRE(r.code == 0);
    const VideoClip a = load_clip(tmp / "src");
    const VideoClip b = load_clip(tmp / "out");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.frames[i] == b.frames[i]);
    const PairRecord rec = load_pair_record((tmp / "out" / "record.json").string());
    CHECK(rec.photo.size() == 3);
    CHECK(rec.photo[0].d_f == 0.3);
}

TEST_CASE("bokeh without disparity fails cleanly") {
    TempDir tmp;
    write_scene(tmp);
    const Run r = run(tmp, "simulate " + q(tmp / "src") + " " + q(tmp / "out") + " --bokeh 0.5");
    CHECK(r.code == 1);
    const json err = last_json_line(r.err);
    CHECK(err["error"] == "missing_input");
    CHECK(err["message"].get<std::string>().find("disparity") != std::string::npos);
}

TEST_CASE("signal files and flag overrides") {
    TempDir tmp;
    write_scene(tmp);
    std::ofstream(tmp / "sig.json") << R"({"K": [0.1, 0.2, 0.3], "d_f": 0.5, "f": 0, "S": 0.2, "T": 0})";
    const Run r = run(tmp, "simulate " + q(tmp / "src") + " " + q(tmp / "out") + " --signal " + q(tmp / "sig.json") +
                               " --disparity " + q(tmp / "disp") + " --color-temp -0.4");
    REQUIRE(r.code == 0);
    const PairRecord rec = load_pair_record((tmp / "out" / "record.json").string());
    CHECK(rec.photo[2].K == 0.3);
    CHECK(rec.photo[1].T == -0.4);
    std::ofstream(tmp / "bad.json") << R"({"K": 1.5, "d_f": 0, "f": 0, "S": 0, "T": 0})";
    const Run bad = run(tmp, "simulate " + q(tmp / "src") + " " + q(tmp / "o2") + " --signal " + q(tmp / "bad.json"));
    CHECK(bad.code == 1);
    CHECK(last_json_line(bad.err)["error"] == "validation");
}

TEST_CASE("eval scores a single-effect simulation as one") {
    TempDir tmp;
    write_scene(tmp);
    REQUIRE(run(tmp, "simulate " + q(tmp / "src") + " " + q(tmp / "out") + " --zoom 0.6").code == 0);
    const Run r = run(tmp, "eval " + q(tmp / "out") + " " + q(tmp / "src") + " " + q(tmp / "out" / "record.json"));
    REQUIRE(r.code == 0);
    const json s = json::parse(r.out);
    CHECK(s["zoom"]["exercised"] == true);
    CHECK(std::abs(s["zoom"]["value"].get<double>() - 1.0) <= 1e-9);
    CHECK(s["bokeh"]["value"].is_null());
}

TEST_CASE("score") {
    TempDir tmp;
    write_scene(tmp);
    const auto f = q(tmp / "src" / "000000.png");
    const Run same = run(tmp, "score " + f + " " + f);
    INFO(same.err);
    REQUIRE(same.code == 0);
    CHECK(json::parse(same.out)["displacement"] == 0.0);
    const Run clip = run(tmp, "score " + q(tmp / "src"));
    REQUIRE(clip.code == 0);
    const json j = json::parse(clip.out);
    CHECK(j["frames"] == 3);
    CHECK(j["info_small"].is_null());
}

TEST_CASE("config errors") {
    TempDir tmp;
    std::ofstream(tmp / "cfg.json") << R"({"sensor": {"nope": 1}})";
    const Run r = run(tmp, "--config " + q(tmp / "cfg.json") + " attn-check");
    CHECK(r.code == 1);
    CHECK(last_json_line(r.err)["error"] == "parse");
}

TEST_CASE("attention self-check") {
    TempDir tmp;
    const Run r = run(tmp, "--seed 5 attn-check");
    CHECK(r.code == 0);
    CHECK(json::parse(r.out)["ok"] == true);
}

TEST_CASE("outputs do not depend on the worker count") {
    TempDir tmp;
    const testsupport::Texture tex(512, 3);
    save_clip(testsupport::pan_clip(tex, 96, 64, 90, 0.8, 0.1), tmp / "v0");
    save_clip(testsupport::pan_clip(tex, 96, 64, 85, 0.0, 0.0), tmp / "v1");
    write_scene(tmp, 4);
    std::ofstream(tmp / "videos.jsonl") << json{{"clip", (tmp / "v0").string()}}.dump() << "\n"
                                        << json{{"clip", (tmp / "v1").string()}}.dump() << "\n";
    REQUIRE(run(tmp, "--workers 1 curate " + q(tmp / "videos.jsonl") + " " + q(tmp / "c1.jsonl")).code == 0);
    REQUIRE(run(tmp, "--workers 4 curate " + q(tmp / "videos.jsonl") + " " + q(tmp / "c4.jsonl")).code == 0);
    CHECK(testsupport::read_file(tmp / "c1.jsonl") == testsupport::read_file(tmp / "c4.jsonl"));
    const json first = json::parse(testsupport::read_file(tmp / "c1.jsonl").substr(0, testsupport::read_file(tmp / "c1.jsonl").find('\n')));
    CHECK(first["kept"] == true);

    std::ofstream(tmp / "pairs.jsonl")
        << json{{"clip", (tmp / "src").string()}, {"disparity", (tmp / "disp").string()}}.dump() << "\n"
        << json{{"clip", (tmp / "v0").string()}, {"begin", 10}, {"end", 14}}.dump() << "\n";
    REQUIRE(run(tmp, "--seed 3 --workers 1 pairs " + q(tmp / "pairs.jsonl") + " " + q(tmp / "p1")).code == 0);
    REQUIRE(run(tmp, "--seed 3 --workers 4 pairs " + q(tmp / "pairs.jsonl") + " " + q(tmp / "p4")).code == 0);
    CHECK(testsupport::same_tree(tmp / "p1", tmp / "p4"));
    REQUIRE(run(tmp, "--seed 4 --workers 1 pairs " + q(tmp / "pairs.jsonl") + " " + q(tmp / "p5")).code == 0);
    CHECK_FALSE(testsupport::same_tree(tmp / "p1", tmp / "p5"));
}

}
