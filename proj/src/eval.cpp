#include "photofx/eval.hpp"

#include "photofx/error.hpp"

#include <cmath>

namespace photofx {

std::optional<double> pearson_frame(const Frame& a, const Frame& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw Error(ErrorKind::InvalidArgument, "pearson: frame shapes differ");
    }
    const auto x = a.data();
    const auto y = b.data();
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        if (a == b) return 1.0;
        return std::nullopt;
    }
    return sxy / std::sqrt(sxx * syy);
}

std::optional<double> pearson_frames(const VideoClip& a, const VideoClip& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::InvalidArgument, "pearson: clips have " + std::to_string(a.size()) + " and " +
                                                    std::to_string(b.size()) + " frames");
    }
    if (a.empty()) throw Error(ErrorKind::InvalidArgument, "pearson: empty clips");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto r = pearson_frame(a.frames[i], b.frames[i]);
        if (!r) return std::nullopt;
        sum += *r;
    }
    return sum / static_cast<double>(a.size());
}

EffectScore& EffectScores::operator[](EffectFamily family) {
    switch (family) {
        case EffectFamily::Bokeh: return bokeh;
        case EffectFamily::Zoom: return zoom;
        case EffectFamily::Exposure: return exposure;
        case EffectFamily::Color: return color;
    }
    return bokeh;
}

const EffectScore& EffectScores::operator[](EffectFamily family) const {
    return const_cast<EffectScores&>(*this)[family];
}

EffectScores effect_accuracy(const VideoClip& output, const VideoClip& source,
                             const std::vector<DisparityMap>* disparities, const PairRecord& record,
                             const GlobalConfig& cfg, const EvalOptions& options) {
    if (output.size() != source.size() || output.width() != source.width() || output.height() != source.height()) {
        throw Error(ErrorKind::InvalidArgument, "eval: output and source clips are not aligned");
    }
    if (record.photo.size() != source.size()) {
        throw Error(ErrorKind::InvalidArgument, "eval: record signal has " + std::to_string(record.photo.size()) +
                                                    " frames, source has " + std::to_string(source.size()));
    }
    EffectScores scores;
    for (EffectFamily family : kEffectFamilies) {
        EffectScore& s = scores[family];
        if (is_neutral(record.photo, family)) {
            s.note = "not-exercised";
            continue;
        }
        s.exercised = true;
        if (family == EffectFamily::Bokeh && !disparities) {
            s.note = "missing disparity";
            continue;
        }
        VideoClip pseudo_gt = apply_effects(source, disparities, isolate(record.photo, family), cfg, record.seed,
                                            options.workers);
        if (options.quantize_reference) pseudo_gt = quantize_u8(pseudo_gt);
        s.value = pearson_frames(output, pseudo_gt);
        if (!s.value) s.note = "zero-variance frame";
    }
    return scores;
}

nlohmann::json to_json_value(const EffectScores& scores) {
    nlohmann::json j = nlohmann::json::object();
    for (EffectFamily family : kEffectFamilies) {
        const EffectScore& s = scores[family];
        nlohmann::json e;
        e["value"] = s.value ? nlohmann::json(*s.value) : nlohmann::json(nullptr);
        e["exercised"] = s.exercised;
        if (!s.note.empty()) e["note"] = s.note;
        j[to_string(family)] = e;
    }
    return j;
}

}  // namespace photofx
