#pragma once

#include "photofx/bokeh.hpp"
#include "photofx/color.hpp"
#include "photofx/curation.hpp"
#include "photofx/exposure.hpp"
#include "photofx/vision.hpp"
#include "photofx/zoom.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace photofx {

/// Options for composing effects into training pairs.
struct PairConfig {
    bool bokeh_after_zoom = false;  ///< render bokeh on the zoomed frame and disparity
    bool noisy_exposure = false;    ///< use the stochastic sensor path
};

struct GlobalConfig {
    OpticsConfig optics;
    SensorConfig sensor;
    ColorTempConfig color;
    BokehConfig bokeh;
    CurationConfig curation;
    VisionConfig vision;
    PairConfig pairs;
    std::uint64_t seed = 0;
};

void validate(const GlobalConfig& cfg);

// JSON form, one block per component:
//   {"optics": {...}, "sensor": {...}, "color": {...}, "bokeh": {...},
//    "curation": {...}, "vision": {...}, "pairs": {...}, "seed": N}
// Missing blocks or keys keep their defaults; unknown keys are rejected.
nlohmann::json to_json_value(const GlobalConfig& cfg);
GlobalConfig config_from_json(const nlohmann::json& doc);
GlobalConfig load_config(const std::string& path);

/// SHA-256 (hex) of the canonical JSON of every effect-related block
/// (optics, sensor, color, bokeh, pairs). Curation and vision settings do
/// not change generated pixels and are excluded.
std::string effect_config_digest(const GlobalConfig& cfg);

std::string sha256_hex(std::string_view bytes);

}  // namespace photofx
