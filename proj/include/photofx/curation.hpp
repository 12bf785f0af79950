#pragma once

#include "photofx/imaging.hpp"
#include "photofx/vision.hpp"

#include <optional>
#include <string>
#include <vector>

namespace photofx {

struct CurationConfig {
    std::size_t min_len = 81;
    std::size_t max_len = 100;
    std::size_t w_small = 6;
    std::size_t w_large = 24;
    double theta_small = 1.0;  ///< px
    double theta_large = 2.0;  ///< px
    double luma_threshold = 30.0 / 255.0;
    double face_ratio = 0.15;
    double shot_adaptive_ratio = 3.0;
    double shot_min_content = 15.0 / 255.0;
    int shot_neighborhood = 2;     ///< frames each side for the rolling mean
    std::size_t shot_min_gap = 2;  ///< minimum distance between boundaries
};

void validate(const CurationConfig& cfg);

struct FaceBox {
    double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
};

/// One optional face box per frame.
struct FaceAnnotation {
    std::vector<std::optional<FaceBox>> boxes;
};

FaceAnnotation load_face_annotation(const std::string& path);
FaceAnnotation slice(const FaceAnnotation& faces, std::size_t begin, std::size_t end);

enum class RejectReason { TooShort, LowInfo, FaceCloseup, TooDark };

const char* to_string(RejectReason reason) noexcept;

struct InfoScore {
    double score = 0.0;
    std::size_t windows = 0;
    std::size_t measured = 0;  ///< windows that produced a displacement
    bool unmeasurable() const noexcept { return measured == 0; }
};

struct ClipVerdict {
    bool kept = false;
    std::vector<RejectReason> reasons;
    InfoScore info_small;
    InfoScore info_large;
    double luma = 0.0;
    double max_face_ratio = 0.0;
    bool faces_checked = false;
};

/// Per-transition content score: s[t] = mean |gray(t) - gray(t-1)| for
/// t >= 1; s[0] = 0.
std::vector<double> shot_content_scores(const VideoClip& clip);

/// Adaptive shot-boundary detection. A boundary sits at the first frame of
/// the new shot: s[t] must exceed both shot_min_content and
/// shot_adaptive_ratio times the mean of s over t +- shot_neighborhood
/// (excluding t, floored at 1e-4). Candidates closer than shot_min_gap are
/// resolved in favour of the larger score.
std::vector<std::size_t> detect_shots(const VideoClip& clip, const CurationConfig& cfg = {});

/// Frame ranges [begin, end) between consecutive boundaries.
std::vector<std::pair<std::size_t, std::size_t>> shot_ranges(std::size_t frames,
                                                             const std::vector<std::size_t>& boundaries);

/// Greedy max_len chunks from the start; a tail shorter than min_len is
/// dropped. Returns [begin, end) ranges.
std::vector<std::pair<std::size_t, std::size_t>> partition_ranges(std::size_t frames, const CurationConfig& cfg = {});
std::vector<VideoClip> partition_clips(const VideoClip& shot, const CurationConfig& cfg = {});

/// Mean displacement between frames k*w and (k+1)*w over all complete
/// windows; windows whose displacement is unmeasurable are left out.
InfoScore info_score(const VideoClip& clip, std::size_t w, const VisionConfig& vision = {});
InfoScore info_score(const std::vector<Raster>& gray, std::size_t w, const VisionConfig& vision = {});

double mean_luma(const VideoClip& clip);
double max_face_ratio(const FaceAnnotation& faces, int width, int height);

/// Runs every filter stage and records each failing stage as a reason.
/// Without annotations the face stage is skipped.
ClipVerdict filter_clip(const VideoClip& clip, const std::optional<FaceAnnotation>& faces,
                        const CurationConfig& cfg = {}, const VisionConfig& vision = {});

struct CuratedClip {
    std::size_t begin = 0;  ///< frame range [begin, end) in the source video
    std::size_t end = 0;
    ClipVerdict verdict;
};

/// Full pass over one video: shot detection, greedy partition of each shot
/// and filter_clip on every chunk. A shot too short for any chunk is
/// reported whole (and fails the length stage). Videos under 3 frames are
/// treated as a single shot.
std::vector<CuratedClip> curate_video(const VideoClip& video, const std::optional<FaceAnnotation>& faces,
                                      const CurationConfig& cfg = {}, const VisionConfig& vision = {});

}  // namespace photofx
