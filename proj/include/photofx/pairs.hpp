#pragma once

#include "photofx/config.hpp"
#include "photofx/imaging.hpp"
#include "photofx/rng.hpp"
#include "photofx/signals.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace photofx {

enum class EffectFamily { Bokeh, Zoom, Exposure, Color };

inline constexpr EffectFamily kEffectFamilies[] = {EffectFamily::Bokeh, EffectFamily::Zoom, EffectFamily::Exposure,
                                                   EffectFamily::Color};

const char* to_string(EffectFamily family) noexcept;
EffectFamily effect_family_from_string(const std::string& name);

/// True when the family's parameters leave the image unchanged
/// (K = 0, f = 0, S = 0 or T = 0; d_f alone never matters).
bool is_neutral(const PhotoParams& params, EffectFamily family) noexcept;
bool is_neutral(const PhotoSignal& signal, EffectFamily family) noexcept;

/// Keeps only `family`'s parameters; the rest are reset to neutral. d_f is
/// kept as-is since it is inert without K.
PhotoParams isolate(const PhotoParams& params, EffectFamily family) noexcept;
PhotoSignal isolate(const PhotoSignal& signal, EffectFamily family);

struct SamplingStrategy {
    double p_single = 0.5;
    std::optional<EffectFamily> forced_family;  ///< single-effect draws use this family
    std::uint64_t seed = 0;
};

struct SampledParams {
    PhotoParams params;
    std::optional<EffectFamily> single;  ///< set when the draw modifies one family only
};

/// With probability p_single one family is drawn uniformly (or the forced
/// one) and only its parameters are sampled; otherwise every parameter is
/// uniform over its full range. d_f is always uniform on [0, 1], including
/// draws where K = 0, so the model learns that d_f is inert without blur.
SampledParams sample_params(const SamplingStrategy& strategy, SplitMix64& rng);

std::vector<std::string> effect_order(const PairConfig& cfg);

/// Everything needed to regenerate a target bit for bit.
struct PairRecord {
    std::string id;
    std::string origin;  ///< source clip directory as given in the input manifest
    std::optional<std::string> disparity;
    std::size_t range_begin = 0;
    std::size_t range_end = 0;
    std::string source_path;
    std::string target_path;
    PhotoSignal photo;
    TrajSignal trajectory;
    std::vector<std::string> effect_order;
    std::uint64_t seed = 0;
    std::string config_digest;
};

nlohmann::json to_json_value(const PairRecord& record);
PairRecord pair_record_from_json(const nlohmann::json& j);
PairRecord load_pair_record(const std::string& path);

/// One frame through the chain in the configured order: bokeh, zoom (frame
/// and disparity together), exposure, colour temperature; with
/// bokeh_after_zoom the first two swap. A stage with neutral parameters is
/// skipped, so it is an exact identity even on the noisy exposure path.
/// `disparity` may be null when K = 0.
Frame apply_effects(const Frame& frame, const DisparityMap* disparity, const PhotoParams& params,
                    const GlobalConfig& cfg, std::uint64_t seed, std::uint64_t frame_index);

VideoClip apply_effects(const VideoClip& clip, const std::vector<DisparityMap>* disparities, const PhotoSignal& signal,
                        const GlobalConfig& cfg, std::uint64_t seed, unsigned workers = 1);

struct GeneratedPair {
    VideoClip target;
    PairRecord record;
};

/// Throws MissingInput (message names "disparity") when K > 0 at any frame
/// and no disparity maps are supplied.
GeneratedPair generate_pair(const VideoClip& clip, const std::vector<DisparityMap>* disparities,
                            const PhotoSignal& signal, const GlobalConfig& cfg, std::uint64_t seed,
                            unsigned workers = 1);

/// Re-runs a record. Throws Validation when cfg does not match the digest.
VideoClip regenerate(const PairRecord& record, const VideoClip& clip, const std::vector<DisparityMap>* disparities,
                     const GlobalConfig& cfg, unsigned workers = 1);

struct ManifestEntry {
    std::string clip;
    std::optional<std::string> disparity;
    std::optional<std::size_t> begin;
    std::optional<std::size_t> end;
};

/// Input manifests are JSON lines: {"clip": dir, "disparity": dir?,
/// "begin": n?, "end": n?}. Curation output lines are accepted as-is (extra
/// keys are ignored; records with "kept": false are skipped).
std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path);

struct SkippedClip {
    std::size_t index;
    std::string clip;
    std::string reason;
};

struct DatasetResult {
    std::vector<PairRecord> records;
    std::vector<SkippedClip> skipped;
};

using LogSink = std::function<void(const nlohmann::json&)>;

/// Writes pairs/<id>/{source,target} frame directories, pairs/<id>/signal
/// and manifest.jsonl under out_dir. Clip i draws its parameters and seed
/// from stream (strategy.seed, i), so output is independent of `workers`.
DatasetResult build_dataset(const std::vector<ManifestEntry>& entries, const SamplingStrategy& strategy,
                            const GlobalConfig& cfg, const std::filesystem::path& out_dir, unsigned workers = 1,
                            const LogSink& log = {});

}  // namespace photofx
