// photofx: command-line front end for the simulators, curation, pair
// generation, evaluation and the attention self-check.
#include "photofx/attention.hpp"
#include "photofx/config.hpp"
#include "photofx/curation.hpp"
#include "photofx/error.hpp"
#include "photofx/eval.hpp"
#include "photofx/imaging.hpp"
#include "photofx/pairs.hpp"
#include "photofx/parallel.hpp"
#include "photofx/signal_json.hpp"
#include "photofx/signals.hpp"
#include "photofx/vision.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace photofx;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
};

struct EffectFlags {
    std::optional<double> bokeh, focus, zoom, exposure, color_temp;

    bool any() const { return bokeh || focus || zoom || exposure || color_temp; }

    void apply(PhotoSignal& signal) const {
        for (PhotoParams& p : signal.per_frame) {
            if (bokeh) p.K = *bokeh;
            if (focus) p.d_f = *focus;
            if (zoom) p.f = *zoom;
            if (exposure) p.S = *exposure;
            if (color_temp) p.T = *color_temp;
        }
    }
};

void log_event(const json& event) { std::cerr << event.dump() << "\n"; }

GlobalConfig resolve_config(const CommonOptions& opts) {
    GlobalConfig cfg = opts.config_path.empty() ? GlobalConfig{} : load_config(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    validate(cfg);
    return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

std::optional<std::vector<DisparityMap>> load_optional_disparities(const std::string& dir, std::size_t begin,
                                                                    std::size_t end) {
    if (dir.empty()) return std::nullopt;
    std::vector<DisparityMap> all = load_disparities(dir);
    if (all.size() < end) {
        throw Error(ErrorKind::MissingInput, "disparity sequence in " + dir + " has " + std::to_string(all.size()) +
                                                 " maps, need " + std::to_string(end));
    }
    return std::vector<DisparityMap>(all.begin() + static_cast<std::ptrdiff_t>(begin),
                                     all.begin() + static_cast<std::ptrdiff_t>(end));
}

// --- simulate ------------------------------------------------------------------

struct SimulateArgs {
    std::string in_dir, out_dir, signal_file, disparity_dir;
};

int cmd_simulate(const SimulateArgs& a, const CommonOptions& common, const EffectFlags& flags) {
    const GlobalConfig cfg = resolve_config(common);
    const VideoClip clip = load_clip(a.in_dir);
    PhotoSignal signal;
    if (!a.signal_file.empty()) {
        signal = load_signal_file(a.signal_file).photo;
    } else if (flags.any()) {
        signal = constant_signal(PhotoParams{}, clip.size());
    } else {
        throw Error(ErrorKind::InvalidArgument, "simulate: give --signal or at least one effect flag");
    }
    flags.apply(signal);
    const auto disparities = load_optional_disparities(a.disparity_dir, 0, clip.size());
    GeneratedPair pair = generate_pair(clip, disparities ? &*disparities : nullptr, signal, cfg, cfg.seed,
                                       common.workers);
    PairRecord& r = pair.record;
    r.id = "simulate";
    r.origin = a.in_dir;
    if (!a.disparity_dir.empty()) r.disparity = a.disparity_dir;
    r.source_path = a.in_dir;
    r.target_path = a.out_dir;
    save_clip(pair.target, a.out_dir);
    write_text(fs::path(a.out_dir) / "record.json", to_json_value(r).dump(2) + "\n");
    log_event({{"level", "info"}, {"event", "simulate"}, {"frames", clip.size()}, {"out", a.out_dir}});
    return 0;
}

// --- curate --------------------------------------------------------------------

struct CurateArgs {
    std::string in_manifest, out_manifest;
};

struct CurateInput {
    std::string clip;
    std::optional<std::string> disparity;
    std::optional<std::string> faces;
};

std::vector<CurateInput> load_curate_inputs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open manifest " + path);
    std::vector<CurateInput> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const json j = json::parse(line);
            CurateInput c;
            c.clip = j.at("clip").get<std::string>();
            if (j.contains("disparity") && !j["disparity"].is_null()) c.disparity = j["disparity"].get<std::string>();
            if (j.contains("faces") && !j["faces"].is_null()) c.faces = j["faces"].get<std::string>();
            out.push_back(std::move(c));
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Parse, path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

json verdict_json(const CurateInput& input, std::size_t begin, std::size_t end, const ClipVerdict& v) {
    json reasons = json::array();
    for (RejectReason r : v.reasons) reasons.push_back(to_string(r));
    json j{{"clip", input.clip},
           {"begin", begin},
           {"end", end},
           {"kept", v.kept},
           {"reasons", reasons},
           {"info_small", v.info_small.score},
           {"info_small_measured", v.info_small.measured},
           {"info_large", v.info_large.score},
           {"info_large_measured", v.info_large.measured},
           {"luma", v.luma},
           {"max_face_ratio", v.faces_checked ? json(v.max_face_ratio) : json(nullptr)}};
    if (input.disparity) j["disparity"] = *input.disparity;
    return j;
}

int cmd_curate(const CurateArgs& a, const CommonOptions& common) {
    const GlobalConfig cfg = resolve_config(common);
    const std::vector<CurateInput> inputs = load_curate_inputs(a.in_manifest);

    // Each video yields a list of verdict lines; collected per index so the
    // log order never depends on scheduling.
    std::vector<std::vector<json>> lines(inputs.size());
    std::vector<std::string> errors(inputs.size());
    parallel_for(inputs.size(), common.workers, [&](std::size_t i) {
        try {
            const CurateInput& input = inputs[i];
            const VideoClip video = load_clip(input.clip);
            std::optional<FaceAnnotation> faces;
            if (input.faces) faces = load_face_annotation(*input.faces);
            for (const CuratedClip& c : curate_video(video, faces, cfg.curation, cfg.vision)) {
                lines[i].push_back(verdict_json(input, c.begin, c.end, c.verdict));
            }
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    std::ofstream out(a.out_manifest, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + a.out_manifest);
    std::size_t kept = 0, total = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!errors[i].empty()) {
            log_event({{"level", "warn"}, {"event", "skip"}, {"clip", inputs[i].clip}, {"reason", errors[i]}});
            continue;
        }
        for (const json& j : lines[i]) {
            out << j.dump() << "\n";
            ++total;
            if (j["kept"].get<bool>()) ++kept;
        }
    }
    if (!out) throw Error(ErrorKind::Io, "cannot write " + a.out_manifest);
    log_event({{"level", "info"}, {"event", "curate"}, {"clips", total}, {"kept", kept}});
    return 0;
}

// --- score ---------------------------------------------------------------------

int cmd_score(const std::vector<std::string>& paths, const CommonOptions& common) {
    const GlobalConfig cfg = resolve_config(common);
    json result;
    if (paths.size() == 2) {
        const Raster a = to_grayscale(load_frame(paths[0]));
        const Raster b = to_grayscale(load_frame(paths[1]));
        const auto d = displacement_score(a, b, cfg.vision);
        result = {{"displacement", d ? json(*d) : json(nullptr)}, {"measurable", d.has_value()}};
    } else if (paths.size() == 1) {
        const VideoClip clip = load_clip(paths[0]);
        const auto info = [&](std::size_t w) -> json {
            if (clip.size() <= w) return nullptr;
            const InfoScore s = info_score(clip, w, cfg.vision);
            return {{"score", s.score}, {"windows", s.windows}, {"measured", s.measured}};
        };
        result = {{"frames", clip.size()},
                  {"info_small", info(cfg.curation.w_small)},
                  {"info_large", info(cfg.curation.w_large)},
                  {"luma", mean_luma(clip)},
                  {"shots", clip.size() >= 3 ? json(detect_shots(clip, cfg.curation)) : json::array()}};
    } else {
        throw Error(ErrorKind::InvalidArgument, "score: give one clip directory or two frame files");
    }
    std::cout << result.dump() << "\n";
    return 0;
}

// --- pairs ---------------------------------------------------------------------

struct PairsArgs {
    std::string manifest, out_dir, family;
    double p_single = 0.5;
};

int cmd_pairs(const PairsArgs& a, const CommonOptions& common) {
    const GlobalConfig cfg = resolve_config(common);
    SamplingStrategy strategy;
    strategy.p_single = a.p_single;
    strategy.seed = cfg.seed;
    if (!a.family.empty()) strategy.forced_family = effect_family_from_string(a.family);
    const DatasetResult result =
        build_dataset(load_manifest(a.manifest), strategy, cfg, a.out_dir, common.workers, log_event);
    log_event({{"level", "info"}, {"event", "pairs"}, {"written", result.records.size()},
               {"skipped", result.skipped.size()}});
    return 0;
}

// --- eval ----------------------------------------------------------------------

struct EvalArgs {
    std::string output_dir, source_dir, record_path, disparity_dir;
};

int cmd_eval(const EvalArgs& a, const CommonOptions& common) {
    const GlobalConfig cfg = resolve_config(common);
    const PairRecord record = load_pair_record(a.record_path);
    const VideoClip output = load_clip(a.output_dir);
    const VideoClip source = load_clip(a.source_dir);
    std::string disparity_dir = a.disparity_dir;
    if (disparity_dir.empty() && record.disparity) disparity_dir = *record.disparity;
    std::optional<std::vector<DisparityMap>> disparities;
    if (!disparity_dir.empty()) {
        // Record ranges index the original clip; a pair's source directory
        // already holds just that range.
        const std::size_t begin = source.size() == record.range_end - record.range_begin ? record.range_begin : 0;
        disparities = load_optional_disparities(disparity_dir, begin, begin + source.size());
    }
    EvalOptions options;
    options.quantize_reference = true;
    options.workers = common.workers;
    const EffectScores scores =
        effect_accuracy(output, source, disparities ? &*disparities : nullptr, record, cfg, options);
    std::cout << to_json_value(scores).dump() << "\n";
    return 0;
}

// --- attn-check ----------------------------------------------------------------

int cmd_attn_check(const CommonOptions& common) {
    const GlobalConfig cfg = resolve_config(common);
    const int dim = 8, heads = 2, tokens = 6, frames = 4;
    SplitMix64 rng(stream_key(cfg.seed, {0xc4ec}));

    PhotoSignal photo;
    for (int i = 0; i < frames; ++i) {
        photo.per_frame.push_back({unit_uniform(rng), unit_uniform(rng), unit_uniform(rng), uniform_in(rng, -1, 1),
                                   uniform_in(rng, -1, 1)});
    }
    ControlEmbeddings ctrl;
    ctrl.pho = encode_pho(photo, random_encoder(5, 16, dim, stream_key(cfg.seed, {1})));
    ctrl.traj = encode_traj(identity_traj(frames), random_encoder(12, 16, dim, stream_key(cfg.seed, {2})));

    TokenSequence in;
    in.tokens = Matrix(tokens, dim);
    for (int r = 0; r < tokens; ++r) {
        for (int c = 0; c < dim; ++c) in.tokens(r, c) = uniform_in(rng, -1, 1);
        in.positions.push_back(static_cast<double>(r * frames / tokens));
    }

    json checks;
    DecoupledAttnWeights w = init_decoupled_attention(dim, heads, stream_key(cfg.seed, {3}));
    checks["zero_init_identity"] = decoupled_cross_attention(in, ctrl, w).tokens == in.tokens;

    SplitMix64 wo_rng(stream_key(cfg.seed, {4}));
    for (Eigen::Index r = 0; r < w.w_o.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.w_o.cols(); ++c) w.w_o(r, c) = uniform_in(wo_rng, -0.5, 0.5);
    }
    const AttentionTrace base = decoupled_cross_attention_trace(in, ctrl, w);
    ControlEmbeddings perturbed = ctrl;
    perturbed.pho.array() += 0.25;
    const AttentionTrace moved = decoupled_cross_attention_trace(in, perturbed, w);
    checks["branch_independence"] = moved.o_traj == base.o_traj;

    double worst_row = 0.0;
    for (const auto* probs : {&base.probs_traj, &base.probs_pho}) {
        for (const Matrix& p : *probs) worst_row = std::max(worst_row, (p.rowwise().sum().array() - 1.0).abs().maxCoeff());
    }
    checks["softmax_rows"] = worst_row <= 1e-9;

    const Matrix rotated = rope_apply(in.tokens, in.positions);
    checks["rope_norm"] = ((rotated.rowwise().norm() - in.tokens.rowwise().norm()).array().abs().maxCoeff() <= 1e-7);

    const std::vector<double> x0{0.1, -0.4, 0.7}, x1{0.3, 0.2, -0.5};
    const std::vector<double> v = fm_target(x0, x1);
    checks["fm_endpoints"] = fm_interpolate(x0, x1, 0.0) == x0 && fm_interpolate(x0, x1, 1.0) == x1;
    checks["fm_zero_loss"] = fm_loss(v, x0, x1) == 0.0;

    bool ok = true;
    for (const auto& [name, value] : checks.items()) ok = ok && value.get<bool>();
    std::cout << json{{"seed", cfg.seed}, {"ok", ok}, {"checks", checks}}.dump() << "\n";
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photographic-effect simulation, curation and pair generation"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions common;
    app.add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--seed", common.seed, "Override the config seed");
    app.add_option("--workers", common.workers, "Worker threads")->check(CLI::PositiveNumber);

    EffectFlags flags;
    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Apply effects to a frame directory");
    simulate->add_option("input", sim.in_dir, "Source frame directory")->required();
    simulate->add_option("output", sim.out_dir, "Output directory")->required();
    simulate->add_option("--signal", sim.signal_file, "Signal file");
    simulate->add_option("--disparity", sim.disparity_dir, "Disparity directory");
    simulate->add_option("--bokeh", flags.bokeh, "Blur strength K in [0, 1]");
    simulate->add_option("--focus", flags.focus, "Focal disparity d_f in [0, 1]");
    simulate->add_option("--zoom", flags.zoom, "Normalized focal length in [0, 1]");
    simulate->add_option("--exposure", flags.exposure, "Shutter control in [-1, 1]");
    simulate->add_option("--color-temp", flags.color_temp, "Colour temperature control in [-1, 1]");

    CurateArgs cur;
    auto* curate = app.add_subcommand("curate", "Split, partition and filter videos into a verdict log");
    curate->add_option("manifest", cur.in_manifest, "Input JSONL: {\"clip\", \"faces\"?, \"disparity\"?}")->required();
    curate->add_option("output", cur.out_manifest, "Verdict log (JSONL)")->required();

    std::vector<std::string> score_paths;
    auto* score = app.add_subcommand("score", "Information, luma and shot scores of a clip, or displacement of two frames");
    score->add_option("paths", score_paths, "Clip directory, or two frame files")->required()->expected(1, 2);

    PairsArgs pa;
    auto* pairs = app.add_subcommand("pairs", "Generate a paired dataset");
    pairs->add_option("manifest", pa.manifest, "Input JSONL manifest")->required();
    pairs->add_option("output", pa.out_dir, "Output directory")->required();
    pairs->add_option("--p-single", pa.p_single, "Probability of a single-effect draw")->check(CLI::Range(0.0, 1.0));
    pairs->add_option("--family", pa.family, "Force single-effect draws to this family");

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "Per-effect accuracy of an output against its source");
    eval->add_option("output", ev.output_dir, "Output frame directory")->required();
    eval->add_option("source", ev.source_dir, "Source frame directory")->required();
    eval->add_option("record", ev.record_path, "Pair record (JSON)")->required();
    eval->add_option("--disparity", ev.disparity_dir, "Disparity directory (defaults to the record's)");

    auto* attn = app.add_subcommand("attn-check", "Check the attention invariants on random instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }

    try {
        if (*simulate) return cmd_simulate(sim, common, flags);
        if (*curate) return cmd_curate(cur, common);
        if (*score) return cmd_score(score_paths, common);
        if (*pairs) return cmd_pairs(pa, common);
        if (*eval) return cmd_eval(ev, common);
        if (*attn) return cmd_attn_check(common);
    } catch (const Error& e) {
        std::cerr << json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    return 1;
}
