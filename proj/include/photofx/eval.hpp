#pragma once

#include "photofx/config.hpp"
#include "photofx/imaging.hpp"
#include "photofx/pairs.hpp"

#include <optional>
#include <string>
#include <vector>

namespace photofx {

/// Pearson r between two same-shaped clips: per frame over all samples,
/// then averaged over frames. nullopt ("undefined") when some frame has
/// zero variance on either side, unless the two frames are identical, in
/// which case that frame counts as 1.
std::optional<double> pearson_frames(const VideoClip& a, const VideoClip& b);

/// Pearson r of one frame pair, same zero-variance rule.
std::optional<double> pearson_frame(const Frame& a, const Frame& b);

struct EffectScore {
    std::optional<double> value;
    bool exercised = false;
    std::string note;  ///< why the value is undefined, if it is
};

struct EffectScores {
    EffectScore bokeh;
    EffectScore zoom;
    EffectScore exposure;
    EffectScore color;

    EffectScore& operator[](EffectFamily family);
    const EffectScore& operator[](EffectFamily family) const;
};

struct EvalOptions {
    /// Round pseudo ground truth to the 8-bit grid before scoring; use when
    /// the candidate was read back from 8-bit files.
    bool quantize_reference = false;
    unsigned workers = 1;
};

/// For every family the record exercises, renders a pseudo ground truth by
/// applying only that family's recorded parameters to `source`, then scores
/// pearson_frames(output, pseudo_gt). Families left neutral by the record
/// are reported as not exercised.
EffectScores effect_accuracy(const VideoClip& output, const VideoClip& source,
                             const std::vector<DisparityMap>* disparities, const PairRecord& record,
                             const GlobalConfig& cfg, const EvalOptions& options = {});

nlohmann::json to_json_value(const EffectScores& scores);

}  // namespace photofx
