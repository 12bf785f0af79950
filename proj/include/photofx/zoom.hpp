#pragma once

#include "photofx/imaging.hpp"

#include <utility>

namespace photofx {

enum class DiagonalMode {
    SensorDiagonal,  ///< diag = sensor diagonal in mm (physically consistent)
    PixelDiagonal,   ///< diag = sqrt(h^2 + w^2) in pixels, mixed with mm focal lengths
};

struct OpticsConfig {
    double f_source = 24.0;       ///< mm, the assumed source lens
    double f_max = 70.0;          ///< mm, reached at f = 1
    double sensor_diag = 43.266;  ///< mm, full-frame diagonal
    DiagonalMode mode = DiagonalMode::SensorDiagonal;
};

void validate(const OpticsConfig& cfg);

/// f_mm = f_source + f_norm (f_max - f_source).
double focal_denormalize(double f_norm, const OpticsConfig& cfg = {});

/// Field of view in radians: 2 atan(diag / 2f).
double fov(double diag, double focal);

/// FoV_target / FoV_source for a normalized focal length.
double fov_ratio(int height, int width, double f_norm, const OpticsConfig& cfg = {});

struct CropDims {
    int height;
    int width;
    bool operator==(const CropDims&) const = default;
};

/// round-half-up(ratio * h), round-half-up(ratio * w), each at least 2.
CropDims crop_dims(int height, int width, double f_norm, const OpticsConfig& cfg = {});

/// Centre crop to crop_dims then bilinear resize back to the input size.
Frame apply_zoom(const Frame& frame, double f_norm, const OpticsConfig& cfg = {});

/// Same geometry applied to a disparity map (nearest-neighbour resize) so
/// depth stays aligned with the zoomed frame.
std::pair<Frame, DisparityMap> apply_zoom_with_disparity(const Frame& frame, const DisparityMap& disparity,
                                                         double f_norm, const OpticsConfig& cfg = {});

}  // namespace photofx
