#include "photofx/pairs.hpp"

#include "photofx/bokeh.hpp"
#include "photofx/color.hpp"
#include "photofx/error.hpp"
#include "photofx/exposure.hpp"
#include "photofx/parallel.hpp"
#include "photofx/signal_json.hpp"
#include "photofx/zoom.hpp"

#include <fstream>
#include <sstream>

namespace photofx {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(EffectFamily family) noexcept {
    switch (family) {
        case EffectFamily::Bokeh: return "bokeh";
        case EffectFamily::Zoom: return "zoom";
        case EffectFamily::Exposure: return "exposure";
        case EffectFamily::Color: return "color";
    }
    return "unknown";
}

EffectFamily effect_family_from_string(const std::string& name) {
    for (EffectFamily f : kEffectFamilies) {
        if (name == to_string(f)) return f;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown effect family \"" + name + "\"");
}

bool is_neutral(const PhotoParams& p, EffectFamily family) noexcept {
    switch (family) {
        case EffectFamily::Bokeh: return p.K == 0.0;
        case EffectFamily::Zoom: return p.f == 0.0;
        case EffectFamily::Exposure: return p.S == 0.0;
        case EffectFamily::Color: return p.T == 0.0;
    }
    return true;
}

bool is_neutral(const PhotoSignal& signal, EffectFamily family) noexcept {
    for (const PhotoParams& p : signal.per_frame) {
        if (!is_neutral(p, family)) return false;
    }
    return true;
}

PhotoParams isolate(const PhotoParams& p, EffectFamily family) noexcept {
    PhotoParams out;
    out.d_f = p.d_f;
    switch (family) {
        case EffectFamily::Bokeh: out.K = p.K; break;
        case EffectFamily::Zoom: out.f = p.f; break;
        case EffectFamily::Exposure: out.S = p.S; break;
        case EffectFamily::Color: out.T = p.T; break;
    }
    return out;
}

PhotoSignal isolate(const PhotoSignal& signal, EffectFamily family) {
    PhotoSignal out;
    out.per_frame.reserve(signal.size());
    for (const PhotoParams& p : signal.per_frame) out.per_frame.push_back(isolate(p, family));
    return out;
}

SampledParams sample_params(const SamplingStrategy& strategy, SplitMix64& rng) {
    if (!(strategy.p_single >= 0.0 && strategy.p_single <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "sampling: p_single must lie in [0, 1]");
    }
    SampledParams out;
    const bool single = unit_uniform(rng) < strategy.p_single;
    PhotoParams& p = out.params;
    if (single) {
        const EffectFamily family =
            strategy.forced_family ? *strategy.forced_family : kEffectFamilies[uniform_index(rng, 4)];
        out.single = family;
        switch (family) {
            case EffectFamily::Bokeh: p.K = unit_uniform(rng); break;
            case EffectFamily::Zoom: p.f = unit_uniform(rng); break;
            case EffectFamily::Exposure: p.S = uniform_in(rng, -1.0, 1.0); break;
            case EffectFamily::Color: p.T = uniform_in(rng, -1.0, 1.0); break;
        }
    } else {
        p.K = unit_uniform(rng);
        p.f = unit_uniform(rng);
        p.S = uniform_in(rng, -1.0, 1.0);
        p.T = uniform_in(rng, -1.0, 1.0);
    }
    p.d_f = unit_uniform(rng);
    return out;
}

std::vector<std::string> effect_order(const PairConfig& cfg) {
    if (cfg.bokeh_after_zoom) return {"zoom", "bokeh", "exposure", "color"};
    return {"bokeh", "zoom", "exposure", "color"};
}

// --- records ---------------------------------------------------------------

json to_json_value(const PairRecord& r) {
    json j;
    j["id"] = r.id;
    j["origin"] = r.origin;
    j["disparity"] = r.disparity ? json(*r.disparity) : json(nullptr);
    j["range"] = {r.range_begin, r.range_end};
    j["source_path"] = r.source_path;
    j["target_path"] = r.target_path;
    j["signal"] = to_json_value(r.photo, r.trajectory);
    j["effect_order"] = r.effect_order;
    j["seed"] = r.seed;
    j["config_digest"] = r.config_digest;
    return j;
}

PairRecord pair_record_from_json(const json& j) {
    PairRecord r;
    try {
        r.id = j.at("id").get<std::string>();
        r.origin = j.at("origin").get<std::string>();
        if (j.contains("disparity") && !j.at("disparity").is_null()) r.disparity = j.at("disparity").get<std::string>();
        const json& range = j.at("range");
        r.range_begin = range.at(0).get<std::size_t>();
        r.range_end = range.at(1).get<std::size_t>();
        r.source_path = j.at("source_path").get<std::string>();
        r.target_path = j.at("target_path").get<std::string>();
        r.effect_order = j.at("effect_order").get<std::vector<std::string>>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.config_digest = j.at("config_digest").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Parse, std::string("pair record: ") + e.what());
    }
    ControlSignals signals = control_signals_from_json(j.at("signal"));
    r.photo = std::move(signals.photo);
    r.trajectory = signals.trajectory ? std::move(*signals.trajectory) : identity_traj(r.photo.size());
    return r;
}

PairRecord load_pair_record(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open pair record " + path);
    try {
        return pair_record_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, "pair record " + path + ": malformed JSON at byte " + std::to_string(e.byte));
    }
}

// --- generation --------------------------------------------------------------

Frame apply_effects(const Frame& frame, const DisparityMap* disparity, const PhotoParams& params,
                    const GlobalConfig& cfg, std::uint64_t seed, std::uint64_t frame_index) {
    validate(params);
    if (params.K > 0.0 && !disparity) {
        throw Error(ErrorKind::MissingInput, "frame " + std::to_string(frame_index) +
                                                 ": bokeh requires a disparity map (K > 0)");
    }
    Frame out = frame;
    std::optional<DisparityMap> disp;
    if (disparity) disp = *disparity;

    auto bokeh = [&] {
        if (params.K > 0.0) out = render_bokeh(out, *disp, params.K, params.d_f, cfg.bokeh);
    };
    auto zoom = [&] {
        if (params.f == 0.0) return;
        if (disp) {
            auto [f, d] = apply_zoom_with_disparity(out, *disp, params.f, cfg.optics);
            out = std::move(f);
            disp = std::move(d);
        } else {
            out = apply_zoom(out, params.f, cfg.optics);
        }
    };
    if (cfg.pairs.bokeh_after_zoom) {
        zoom();
        bokeh();
    } else {
        bokeh();
        zoom();
    }
    if (params.S != 0.0) {
        out = cfg.pairs.noisy_exposure ? apply_exposure_noisy(out, params.S, cfg.sensor, seed, frame_index)
                                       : apply_exposure(out, params.S, cfg.sensor);
    }
    if (params.T != 0.0) out = apply_color_temperature(out, params.T, cfg.color);
    return out;
}

VideoClip apply_effects(const VideoClip& clip, const std::vector<DisparityMap>* disparities, const PhotoSignal& signal,
                        const GlobalConfig& cfg, std::uint64_t seed, unsigned workers) {
    validate(signal);
    if (signal.size() != clip.size()) {
        throw Error(ErrorKind::InvalidArgument, "signal has " + std::to_string(signal.size()) + " frames, clip has " +
                                                    std::to_string(clip.size()));
    }
    if (disparities && disparities->size() != clip.size()) {
        throw Error(ErrorKind::InvalidArgument, "disparity sequence has " + std::to_string(disparities->size()) +
                                                    " maps, clip has " + std::to_string(clip.size()) + " frames");
    }
    if (!disparities && !is_neutral(signal, EffectFamily::Bokeh)) {
        throw Error(ErrorKind::MissingInput, "bokeh requires a disparity map per frame (K > 0) but none was given");
    }
    VideoClip out;
    out.fps = clip.fps;
    out.frames.resize(clip.size());
    parallel_for(clip.size(), workers, [&](std::size_t i) {
        out.frames[i] = apply_effects(clip.frames[i], disparities ? &(*disparities)[i] : nullptr, signal[i], cfg, seed, i);
    });
    return out;
}

GeneratedPair generate_pair(const VideoClip& clip, const std::vector<DisparityMap>* disparities,
                            const PhotoSignal& signal, const GlobalConfig& cfg, std::uint64_t seed,
                            unsigned workers) {
    validate(cfg);
    validate(clip);
    GeneratedPair out;
    out.target = apply_effects(clip, disparities, signal, cfg, seed, workers);
    PairRecord& r = out.record;
    r.range_end = clip.size();
    r.photo = signal;
    r.trajectory = identity_traj(clip.size());
    r.effect_order = effect_order(cfg.pairs);
    r.seed = seed;
    r.config_digest = effect_config_digest(cfg);
    return out;
}

VideoClip regenerate(const PairRecord& record, const VideoClip& clip, const std::vector<DisparityMap>* disparities,
                     const GlobalConfig& cfg, unsigned workers) {
    if (effect_config_digest(cfg) != record.config_digest) {
        throw Error(ErrorKind::Validation, "pair " + record.id + ": config digest mismatch");
    }
    if (effect_order(cfg.pairs) != record.effect_order) {
        throw Error(ErrorKind::Validation, "pair " + record.id + ": effect order mismatch");
    }
    return apply_effects(clip, disparities, record.photo, cfg, record.seed, workers);
}

// --- datasets ----------------------------------------------------------------

std::vector<ManifestEntry> load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open manifest " + path.string());
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(lineno) + ": malformed JSON at byte " +
                                              std::to_string(e.byte));
        }
        if (j.contains("kept") && j.at("kept").is_boolean() && !j.at("kept").get<bool>()) continue;
        ManifestEntry e;
        try {
            e.clip = j.at("clip").get<std::string>();
            if (j.contains("disparity") && !j.at("disparity").is_null()) e.disparity = j.at("disparity").get<std::string>();
            if (j.contains("begin")) e.begin = j.at("begin").get<std::size_t>();
            if (j.contains("end")) e.end = j.at("end").get<std::size_t>();
        } catch (const json::exception& ex) {
            throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

namespace {

std::string pair_id(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06zu", index);
    return buf;
}

struct ClipOutcome {
    std::optional<PairRecord> record;
    std::string error;
};

ClipOutcome generate_one(const ManifestEntry& entry, std::size_t index, const SamplingStrategy& strategy,
                         const GlobalConfig& cfg, const fs::path& out_dir) {
    ClipOutcome outcome;
    try {
        VideoClip clip = load_clip(entry.clip);
        const std::size_t begin = entry.begin.value_or(0);
        const std::size_t end = entry.end.value_or(clip.size());
        clip = slice(clip, begin, end);
        std::optional<std::vector<DisparityMap>> disparities;
        if (entry.disparity) {
            auto all = load_disparities(*entry.disparity);
            if (all.size() < end) {
                throw Error(ErrorKind::MissingInput, "disparity sequence shorter than clip range");
            }
            disparities.emplace(all.begin() + static_cast<std::ptrdiff_t>(begin),
                                all.begin() + static_cast<std::ptrdiff_t>(end));
        }

        const std::uint64_t clip_seed = stream_key(strategy.seed, {static_cast<std::uint64_t>(index)});
        SplitMix64 rng(clip_seed);
        const SampledParams sampled = sample_params(strategy, rng);
        const PhotoSignal signal = constant_signal(sampled.params, clip.size());
        GeneratedPair pair = generate_pair(clip, disparities ? &*disparities : nullptr, signal, cfg, clip_seed);

        PairRecord& r = pair.record;
        r.id = pair_id(index);
        r.origin = entry.clip;
        r.disparity = entry.disparity;
        r.range_begin = begin;
        r.range_end = end;
        const fs::path rel = fs::path("pairs") / r.id;
        r.source_path = (rel / "source").generic_string();
        r.target_path = (rel / "target").generic_string();

        save_clip(clip, out_dir / r.source_path);
        save_clip(pair.target, out_dir / r.target_path);
        std::ofstream sig(out_dir / rel / "signal", std::ios::binary);
        sig << serialize(r.photo, r.trajectory);
        if (!sig) throw Error(ErrorKind::Io, "cannot write signal for pair " + r.id);
        outcome.record = std::move(r);
    } catch (const std::exception& e) {
        outcome.error = e.what();
    }
    return outcome;
}

}  // namespace

DatasetResult build_dataset(const std::vector<ManifestEntry>& entries, const SamplingStrategy& strategy,
                            const GlobalConfig& cfg, const fs::path& out_dir, unsigned workers, const LogSink& log) {
    validate(cfg);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create " + out_dir.string());

    std::vector<ClipOutcome> outcomes(entries.size());
    parallel_for(entries.size(), workers,
                 [&](std::size_t i) { outcomes[i] = generate_one(entries[i], i, strategy, cfg, out_dir); });

    DatasetResult result;
    std::ofstream manifest(out_dir / "manifest.jsonl", std::ios::binary);
    if (!manifest) throw Error(ErrorKind::Io, "cannot write " + (out_dir / "manifest.jsonl").string());
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].record) {
            manifest << to_json_value(*outcomes[i].record).dump() << "\n";
            result.records.push_back(std::move(*outcomes[i].record));
        } else {
            result.skipped.push_back({i, entries[i].clip, outcomes[i].error});
            if (log) log(json{{"level", "warn"}, {"event", "skip"}, {"index", i}, {"clip", entries[i].clip},
                              {"reason", outcomes[i].error}});
        }
    }
    return result;
}

}  // namespace photofx
