#pragma once

#include "photofx/imaging.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace photofx {

struct Keypoint {
    double x = 0.0;
    double y = 0.0;
    double response = 0.0;     ///< Harris corner strength
    double orientation = 0.0;  ///< radians, intensity-centroid angle
};

/// 256-bit binary descriptor.
using Descriptor = std::array<std::uint64_t, 4>;

int hamming(const Descriptor& a, const Descriptor& b) noexcept;

struct Features {
    std::vector<Keypoint> keypoints;
    std::vector<Descriptor> descriptors;
};

struct Match {
    std::size_t index_a = 0;
    std::size_t index_b = 0;
    int distance = 0;
    int second_distance = 0;
};

/// [a b tx; c d ty] acting on (x, y, 1).
struct AffineTransform {
    std::array<double, 6> m{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};

    double apply_x(double x, double y) const noexcept { return m[0] * x + m[1] * y + m[2]; }
    double apply_y(double x, double y) const noexcept { return m[3] * x + m[4] * y + m[5]; }
};

struct PointPair {
    double x0, y0;  ///< point in the first image
    double x1, y1;  ///< corresponding point in the second image
};

enum class DisplacementAggregation {
    ProbePoints,  ///< four corners and the centre
    DenseGrid,    ///< 8x8 grid spanning the frame
};

struct VisionConfig {
    int max_features = 500;
    double fast_threshold = 20.0 / 255.0;
    double ratio = 0.75;
    int ransac_iterations = 1000;
    double inlier_tolerance = 2.0;  ///< pixels
    std::uint64_t seed = 0x5eed;
    DisplacementAggregation aggregation = DisplacementAggregation::ProbePoints;
};

/// Half-size of the square patch used by orientation and descriptors; also
/// the border inside which no keypoint is reported.
inline constexpr int kPatchRadius = 15;

/// Oriented FAST/BRIEF features. FAST-9 (16-pixel ring, radius 3) finds
/// candidates, Harris response suppresses non-maxima and ranks them, the
/// intensity centroid gives orientation, and the descriptor compares 256
/// fixed point pairs rotated by that orientation on a smoothed image.
/// Keypoints are sorted by descending response; ties go to raster order.
/// Images narrower or shorter than 32 pixels yield no features.
Features detect_and_describe(const Raster& gray, int max_features, double fast_threshold = 20.0 / 255.0);

/// The fixed sampling pattern: 256 pairs of (dx, dy) offsets.
const std::vector<std::array<int, 4>>& descriptor_pattern();

/// Brute-force two-nearest-neighbour matching from a into b, keeping a
/// match iff distance < ratio * second_distance.
std::vector<Match> match_ratio(const std::vector<Descriptor>& a, const std::vector<Descriptor>& b,
                               double ratio = 0.75);

/// Exact affine through three correspondences; nullopt when collinear.
std::optional<AffineTransform> affine_from_three(const PointPair& p, const PointPair& q, const PointPair& r);

/// Least-squares affine over the given correspondences (>= 3, not all collinear).
std::optional<AffineTransform> affine_least_squares(const std::vector<PointPair>& pairs);

struct RansacResult {
    AffineTransform model;
    std::vector<bool> inliers;
    std::size_t inlier_count = 0;
    std::size_t best_sample_inliers = 0;  ///< largest consensus among minimal samples
};

/// RANSAC over minimal three-point samples. Iteration i draws its sample
/// from a generator keyed by (seed, i); the best consensus wins with ties
/// going to the lowest iteration. The winner is refit by least squares on
/// its inliers and the refit is kept unless it has fewer inliers.
/// Throws Estimation on < 3 pairs or when every sample is degenerate.
RansacResult estimate_affine_ransac(const std::vector<PointPair>& pairs, int iterations = 1000,
                                    double inlier_tolerance = 2.0, std::uint64_t seed = 0x5eed);

/// Mean displacement |A(p) - p| over the aggregation points. nullopt means
/// the pair is unmeasurable: fewer than three matches (or a failed fit) on
/// images that are not near-identical. Near-identical images with no usable
/// matches score 0.
std::optional<double> displacement_score(const Raster& first, const Raster& second, const VisionConfig& cfg = {});

/// Same, reusing already-extracted features.
std::optional<double> displacement_score(const Raster& first, const Features& first_features,
                                         const Raster& second, const Features& second_features,
                                         const VisionConfig& cfg = {});

/// Mean of |A(p) - p| over the aggregation points of a width x height frame.
double affine_displacement(const AffineTransform& model, int width, int height,
                           DisplacementAggregation aggregation = DisplacementAggregation::ProbePoints);

}  // namespace photofx
