#include "photofx/curation.hpp"

#include "photofx/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

namespace photofx {

void validate(const CurationConfig& cfg) {
    if (cfg.min_len == 0 || cfg.min_len > cfg.max_len) {
        throw Error(ErrorKind::Validation, "curation: need 0 < min_len <= max_len");
    }
    if (cfg.w_small == 0 || cfg.w_small >= cfg.w_large) {
        throw Error(ErrorKind::Validation, "curation: need 0 < w_small < w_large");
    }
    if (!(cfg.theta_small > 0.0) || !(cfg.theta_large > 0.0) || !(cfg.luma_threshold > 0.0) ||
        !(cfg.face_ratio > 0.0) || !(cfg.shot_adaptive_ratio > 0.0) || !(cfg.shot_min_content > 0.0)) {
        throw Error(ErrorKind::Validation, "curation: thresholds must be positive");
    }
    if (cfg.shot_neighborhood < 1) throw Error(ErrorKind::Validation, "curation: shot_neighborhood must be >= 1");
}

const char* to_string(RejectReason reason) noexcept {
    switch (reason) {
        case RejectReason::TooShort: return "too-short";
        case RejectReason::LowInfo: return "low-info";
        case RejectReason::FaceCloseup: return "face-closeup";
        case RejectReason::TooDark: return "too-dark";
    }
    return "unknown";
}

FaceAnnotation load_face_annotation(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open face annotation " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Parse, "face annotation " + path + ": malformed JSON at byte " + std::to_string(e.byte));
    }
    const nlohmann::json& boxes = doc.is_object() ? doc.at("boxes") : doc;
    if (!boxes.is_array()) throw Error(ErrorKind::Parse, "face annotation " + path + ": expected an array of boxes");
    FaceAnnotation out;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto& b = boxes[i];
        if (b.is_null()) {
            out.boxes.emplace_back();
            continue;
        }
        if (!b.is_array() || b.size() != 4 || !std::all_of(b.begin(), b.end(), [](const auto& v) { return v.is_number(); })) {
            throw Error(ErrorKind::Parse, "face annotation " + path + ": frame " + std::to_string(i) +
                                              " must be null or [x, y, w, h]");
        }
        out.boxes.push_back(FaceBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()});
    }
    return out;
}

FaceAnnotation slice(const FaceAnnotation& faces, std::size_t begin, std::size_t end) {
    FaceAnnotation out;
    for (std::size_t i = begin; i < end && i < faces.boxes.size(); ++i) out.boxes.push_back(faces.boxes[i]);
    return out;
}

std::vector<double> shot_content_scores(const VideoClip& clip) {
    std::vector<double> s(clip.size(), 0.0);
    if (clip.empty()) return s;
    Raster prev = to_grayscale(clip.frames[0]);
    for (std::size_t t = 1; t < clip.size(); ++t) {
        Raster cur = to_grayscale(clip.frames[t]);
        double sum = 0.0;
        const auto a = prev.values();
        const auto b = cur.values();
        for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(static_cast<double>(b[i]) - a[i]);
        s[t] = sum / static_cast<double>(a.size());
        prev = std::move(cur);
    }
    return s;
}

std::vector<std::size_t> detect_shots(const VideoClip& clip, const CurationConfig& cfg) {
    if (clip.size() < 3) {
        throw Error(ErrorKind::InvalidArgument, "detect_shots: need at least 3 frames, got " +
                                                    std::to_string(clip.size()));
    }
    validate(clip);
    const std::vector<double> s = shot_content_scores(clip);
    const auto n = static_cast<long>(s.size());

    struct Candidate {
        std::size_t t;
        double score;
    };
    std::vector<Candidate> candidates;
    for (long t = 1; t < n; ++t) {
        double sum = 0.0;
        int count = 0;
        for (long k = t - cfg.shot_neighborhood; k <= t + cfg.shot_neighborhood; ++k) {
            if (k == t || k < 1 || k >= n) continue;
            sum += s[static_cast<std::size_t>(k)];
            ++count;
        }
        const double local = std::max(count > 0 ? sum / count : 0.0, 1e-4);
        const double st = s[static_cast<std::size_t>(t)];
        if (st > cfg.shot_adaptive_ratio * local && st > cfg.shot_min_content) {
            candidates.push_back({static_cast<std::size_t>(t), st});
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    std::vector<std::size_t> accepted;
    for (const Candidate& c : candidates) {
        const bool clash = std::any_of(accepted.begin(), accepted.end(), [&](std::size_t b) {
            return (c.t > b ? c.t - b : b - c.t) < cfg.shot_min_gap;
        });
        if (!clash) accepted.push_back(c.t);
    }
    std::sort(accepted.begin(), accepted.end());
    return accepted;
}

std::vector<std::pair<std::size_t, std::size_t>> shot_ranges(std::size_t frames,
                                                             const std::vector<std::size_t>& boundaries) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t begin = 0;
    for (std::size_t b : boundaries) {
        if (b > begin && b < frames) {
            out.emplace_back(begin, b);
            begin = b;
        }
    }
    if (begin < frames) out.emplace_back(begin, frames);
    return out;
}

std::vector<std::pair<std::size_t, std::size_t>> partition_ranges(std::size_t frames, const CurationConfig& cfg) {
    validate(cfg);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t begin = 0; begin < frames; begin += cfg.max_len) {
        const std::size_t end = std::min(frames, begin + cfg.max_len);
        if (end - begin >= cfg.min_len) out.emplace_back(begin, end);
    }
    return out;
}

std::vector<VideoClip> partition_clips(const VideoClip& shot, const CurationConfig& cfg) {
    std::vector<VideoClip> out;
    for (const auto& [b, e] : partition_ranges(shot.size(), cfg)) out.push_back(slice(shot, b, e));
    return out;
}

namespace {

class FeatureCache {
public:
    FeatureCache(const std::vector<Raster>& gray, const VisionConfig& vision) : gray_(gray), vision_(vision) {}

    const Features& at(std::size_t i) {
        auto it = cache_.find(i);
        if (it == cache_.end()) {
            it = cache_.emplace(i, detect_and_describe(gray_[i], vision_.max_features, vision_.fast_threshold)).first;
        }
        return it->second;
    }

private:
    const std::vector<Raster>& gray_;
    const VisionConfig& vision_;
    std::map<std::size_t, Features> cache_;
};

InfoScore info_score_cached(const std::vector<Raster>& gray, std::size_t w, const VisionConfig& vision,
                            FeatureCache& cache) {
    if (w == 0) throw Error(ErrorKind::InvalidArgument, "info_score: window must be >= 1");
    if (gray.size() <= w) {
        throw Error(ErrorKind::InvalidArgument, "info_score: clip of " + std::to_string(gray.size()) +
                                                    " frames is too short for window " + std::to_string(w));
    }
    InfoScore out;
    double sum = 0.0;
    for (std::size_t first = 0; first + w < gray.size(); first += w) {
        const std::size_t last = first + w;
        ++out.windows;
        const auto d = displacement_score(gray[first], cache.at(first), gray[last], cache.at(last), vision);
        if (d) {
            sum += *d;
            ++out.measured;
        }
    }
    out.score = out.measured > 0 ? sum / static_cast<double>(out.measured) : 0.0;
    return out;
}

std::vector<Raster> grayscale_frames(const VideoClip& clip) {
    std::vector<Raster> gray;
    gray.reserve(clip.size());
    for (const Frame& f : clip.frames) gray.push_back(to_grayscale(f));
    return gray;
}

double mean_luma_of(const std::vector<Raster>& gray) {
    if (gray.empty()) return 0.0;
    double total = 0.0;
    for (const Raster& g : gray) {
        double s = 0.0;
        for (float v : g.values()) s += v;
        total += s / static_cast<double>(g.size());
    }
    return total / static_cast<double>(gray.size());
}

}  // namespace

InfoScore info_score(const std::vector<Raster>& gray, std::size_t w, const VisionConfig& vision) {
    FeatureCache cache(gray, vision);
    return info_score_cached(gray, w, vision, cache);
}

InfoScore info_score(const VideoClip& clip, std::size_t w, const VisionConfig& vision) {
    return info_score(grayscale_frames(clip), w, vision);
}

double mean_luma(const VideoClip& clip) {
    return mean_luma_of(grayscale_frames(clip));
}

double max_face_ratio(const FaceAnnotation& faces, int width, int height) {
    const double area = static_cast<double>(width) * height;
    double best = 0.0;
    for (const auto& box : faces.boxes) {
        if (box) best = std::max(best, std::max(0.0, box->w) * std::max(0.0, box->h) / area);
    }
    return best;
}

ClipVerdict filter_clip(const VideoClip& clip, const std::optional<FaceAnnotation>& faces, const CurationConfig& cfg,
                        const VisionConfig& vision) {
    validate(cfg);
    ClipVerdict v;
    if (clip.size() < cfg.min_len) v.reasons.push_back(RejectReason::TooShort);

    const std::vector<Raster> gray = grayscale_frames(clip);
    FeatureCache cache(gray, vision);
    // Clips too short for a window get an unmeasured score of 0.
    if (gray.size() > cfg.w_small) v.info_small = info_score_cached(gray, cfg.w_small, vision, cache);
    if (gray.size() > cfg.w_large) v.info_large = info_score_cached(gray, cfg.w_large, vision, cache);
    if (v.info_small.score < cfg.theta_small && v.info_large.score < cfg.theta_large) {
        v.reasons.push_back(RejectReason::LowInfo);
    }

    if (faces) {
        v.faces_checked = true;
        v.max_face_ratio = max_face_ratio(*faces, clip.width(), clip.height());
        if (v.max_face_ratio > cfg.face_ratio) v.reasons.push_back(RejectReason::FaceCloseup);
    }

    v.luma = mean_luma_of(gray);
    if (v.luma < cfg.luma_threshold) v.reasons.push_back(RejectReason::TooDark);

    v.kept = v.reasons.empty();
    return v;
}

std::vector<CuratedClip> curate_video(const VideoClip& video, const std::optional<FaceAnnotation>& faces,
                                      const CurationConfig& cfg, const VisionConfig& vision) {
    validate(cfg);
    const std::vector<std::size_t> cuts = video.size() >= 3 ? detect_shots(video, cfg) : std::vector<std::size_t>{};
    std::vector<CuratedClip> out;
    for (const auto& [shot_begin, shot_end] : shot_ranges(video.size(), cuts)) {
        auto ranges = partition_ranges(shot_end - shot_begin, cfg);
        if (ranges.empty()) ranges.emplace_back(0, shot_end - shot_begin);
        for (const auto& [b, e] : ranges) {
            CuratedClip c;
            c.begin = shot_begin + b;
            c.end = shot_begin + e;
            std::optional<FaceAnnotation> clip_faces;
            if (faces) clip_faces = slice(*faces, c.begin, c.end);
            c.verdict = filter_clip(slice(video, c.begin, c.end), clip_faces, cfg, vision);
            out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace photofx
