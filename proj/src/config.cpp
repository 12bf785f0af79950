#include "photofx/config.hpp"

#include "photofx/error.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <set>

namespace photofx {

using nlohmann::json;

void validate(const GlobalConfig& cfg) {
    validate(cfg.optics);
    validate(cfg.sensor);
    validate(cfg.color);
    validate(cfg.curation);
    if (cfg.bokeh.layers < 1) throw Error(ErrorKind::Validation, "bokeh: layers must be >= 1");
    if (cfg.vision.max_features < 1 || cfg.vision.ransac_iterations < 1 || !(cfg.vision.ratio > 0.0) ||
        !(cfg.vision.inlier_tolerance > 0.0) || !(cfg.vision.fast_threshold > 0.0)) {
        throw Error(ErrorKind::Validation, "vision: counts, ratio and tolerances must be positive");
    }
}

json to_json_value(const GlobalConfig& cfg) {
    json j;
    j["optics"] = {{"f_source", cfg.optics.f_source},
                   {"f_max", cfg.optics.f_max},
                   {"sensor_diag", cfg.optics.sensor_diag},
                   {"mode", cfg.optics.mode == DiagonalMode::SensorDiagonal ? "sensor-diag" : "pixel-diag"}};
    j["sensor"] = {{"fwc", cfg.sensor.fwc},
                   {"epsilon", cfg.sensor.epsilon},
                   {"qe", cfg.sensor.qe},
                   {"mu_dark", cfg.sensor.mu_dark},
                   {"sigma_read", cfg.sensor.sigma_read}};
    j["color"] = {{"temp_base", cfg.color.temp_base}, {"temp_min", cfg.color.temp_min}, {"temp_max", cfg.color.temp_max}};
    j["bokeh"] = {{"layers", cfg.bokeh.layers}};
    const CurationConfig& c = cfg.curation;
    j["curation"] = {{"min_len", c.min_len},
                     {"max_len", c.max_len},
                     {"w_small", c.w_small},
                     {"w_large", c.w_large},
                     {"theta_small", c.theta_small},
                     {"theta_large", c.theta_large},
                     {"luma_threshold", c.luma_threshold},
                     {"face_ratio", c.face_ratio},
                     {"shot_adaptive_ratio", c.shot_adaptive_ratio},
                     {"shot_min_content", c.shot_min_content},
                     {"shot_neighborhood", c.shot_neighborhood},
                     {"shot_min_gap", c.shot_min_gap}};
    const VisionConfig& v = cfg.vision;
    j["vision"] = {{"max_features", v.max_features},
                   {"fast_threshold", v.fast_threshold},
                   {"ratio", v.ratio},
                   {"ransac_iterations", v.ransac_iterations},
                   {"inlier_tolerance", v.inlier_tolerance},
                   {"seed", v.seed},
                   {"aggregation", v.aggregation == DisplacementAggregation::ProbePoints ? "probe" : "grid"}};
    j["pairs"] = {{"bokeh_after_zoom", cfg.pairs.bokeh_after_zoom}, {"noisy_exposure", cfg.pairs.noisy_exposure}};
    j["seed"] = cfg.seed;
    return j;
}

namespace {

// Reads known keys of one block into place, rejecting anything unexpected.
class BlockReader {
public:
    BlockReader(const json& doc, const char* block) : block_(block) {
        if (auto it = doc.find(block); it != doc.end()) {
            if (!it->is_object()) throw Error(ErrorKind::Parse, std::string("config: \"") + block + "\" must be an object");
            node_ = &*it;
        }
    }

    template <class T>
    BlockReader& read(const char* key, T& out) {
        seen_.insert(key);
        if (!node_) return *this;
        auto it = node_->find(key);
        if (it == node_->end()) return *this;
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw Error(ErrorKind::Parse, std::string("config: ") + block_ + "." + key + " has the wrong type");
        }
        return *this;
    }

    void finish() const {
        if (!node_) return;
        for (const auto& [key, value] : node_->items()) {
            if (!seen_.count(key)) throw Error(ErrorKind::Parse, std::string("config: unknown key ") + block_ + "." + key);
        }
    }

private:
    const char* block_;
    const json* node_ = nullptr;
    std::set<std::string> seen_;
};

}  // namespace

GlobalConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw Error(ErrorKind::Parse, "config: expected a JSON object");
    static const std::set<std::string> blocks{"optics", "sensor", "color", "bokeh", "curation", "vision", "pairs", "seed"};
    for (const auto& [key, value] : doc.items()) {
        if (!blocks.count(key)) throw Error(ErrorKind::Parse, "config: unknown block " + key);
    }
    GlobalConfig cfg;
    std::string mode = cfg.optics.mode == DiagonalMode::SensorDiagonal ? "sensor-diag" : "pixel-diag";
    BlockReader(doc, "optics")
        .read("f_source", cfg.optics.f_source)
        .read("f_max", cfg.optics.f_max)
        .read("sensor_diag", cfg.optics.sensor_diag)
        .read("mode", mode)
        .finish();
    if (mode == "sensor-diag") {
        cfg.optics.mode = DiagonalMode::SensorDiagonal;
    } else if (mode == "pixel-diag") {
        cfg.optics.mode = DiagonalMode::PixelDiagonal;
    } else {
        throw Error(ErrorKind::Parse, "config: optics.mode must be sensor-diag or pixel-diag");
    }
    BlockReader(doc, "sensor")
        .read("fwc", cfg.sensor.fwc)
        .read("epsilon", cfg.sensor.epsilon)
        .read("qe", cfg.sensor.qe)
        .read("mu_dark", cfg.sensor.mu_dark)
        .read("sigma_read", cfg.sensor.sigma_read)
        .finish();
    BlockReader(doc, "color")
        .read("temp_base", cfg.color.temp_base)
        .read("temp_min", cfg.color.temp_min)
        .read("temp_max", cfg.color.temp_max)
        .finish();
    BlockReader(doc, "bokeh").read("layers", cfg.bokeh.layers).finish();
    CurationConfig& c = cfg.curation;
    BlockReader(doc, "curation")
        .read("min_len", c.min_len)
        .read("max_len", c.max_len)
        .read("w_small", c.w_small)
        .read("w_large", c.w_large)
        .read("theta_small", c.theta_small)
        .read("theta_large", c.theta_large)
        .read("luma_threshold", c.luma_threshold)
        .read("face_ratio", c.face_ratio)
        .read("shot_adaptive_ratio", c.shot_adaptive_ratio)
        .read("shot_min_content", c.shot_min_content)
        .read("shot_neighborhood", c.shot_neighborhood)
        .read("shot_min_gap", c.shot_min_gap)
        .finish();
    VisionConfig& v = cfg.vision;
    std::string aggregation = "probe";
    BlockReader(doc, "vision")
        .read("max_features", v.max_features)
        .read("fast_threshold", v.fast_threshold)
        .read("ratio", v.ratio)
        .read("ransac_iterations", v.ransac_iterations)
        .read("inlier_tolerance", v.inlier_tolerance)
        .read("seed", v.seed)
        .read("aggregation", aggregation)
        .finish();
    if (aggregation == "probe") {
        v.aggregation = DisplacementAggregation::ProbePoints;
    } else if (aggregation == "grid") {
        v.aggregation = DisplacementAggregation::DenseGrid;
    } else {
        throw Error(ErrorKind::Parse, "config: vision.aggregation must be probe or grid");
    }
    BlockReader(doc, "pairs")
        .read("bokeh_after_zoom", cfg.pairs.bokeh_after_zoom)
        .read("noisy_exposure", cfg.pairs.noisy_exposure)
        .finish();
    if (auto it = doc.find("seed"); it != doc.end()) {
        if (!it->is_number_unsigned()) throw Error(ErrorKind::Parse, "config: seed must be a non-negative integer");
        cfg.seed = it->get<std::uint64_t>();
    }
    validate(cfg);
    return cfg;
}

GlobalConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, "config " + path + ": malformed JSON at byte " + std::to_string(e.byte));
    }
    return config_from_json(doc);
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::Io, "sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::string effect_config_digest(const GlobalConfig& cfg) {
    const json full = to_json_value(cfg);
    json effect;
    for (const char* key : {"optics", "sensor", "color", "bokeh", "pairs"}) effect[key] = full.at(key);
    return sha256_hex(effect.dump());
}

}  // namespace photofx
