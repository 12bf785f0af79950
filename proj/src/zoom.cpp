#include "photofx/zoom.hpp"

#include "photofx/error.hpp"

#include <algorithm>
#include <cmath>

namespace photofx {

void validate(const OpticsConfig& cfg) {
    if (!(cfg.f_source > 0.0) || !(cfg.f_source < cfg.f_max)) {
        throw Error(ErrorKind::Validation, "optics: need 0 < f_source < f_max");
    }
    if (!(cfg.sensor_diag > 0.0)) throw Error(ErrorKind::Validation, "optics: sensor_diag must be positive");
}

double focal_denormalize(double f_norm, const OpticsConfig& cfg) {
    if (!(f_norm >= 0.0 && f_norm <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "zoom: f = " + std::to_string(f_norm) + " outside [0, 1]");
    }
    validate(cfg);
    return cfg.f_source + f_norm * (cfg.f_max - cfg.f_source);
}

double fov(double diag, double focal) {
    return 2.0 * std::atan(diag / (2.0 * focal));
}

double fov_ratio(int height, int width, double f_norm, const OpticsConfig& cfg) {
    const double f_target = focal_denormalize(f_norm, cfg);
    if (f_norm == 0.0) return 1.0;
    const double diag = cfg.mode == DiagonalMode::SensorDiagonal
                            ? cfg.sensor_diag
                            : std::sqrt(static_cast<double>(height) * height + static_cast<double>(width) * width);
    return fov(diag, f_target) / fov(diag, cfg.f_source);
}

CropDims crop_dims(int height, int width, double f_norm, const OpticsConfig& cfg) {
    const double ratio = fov_ratio(height, width, f_norm, cfg);
    auto scaled = [ratio](int n) {
        const int v = static_cast<int>(std::floor(ratio * n + 0.5));
        return std::clamp(v, 2, n);
    };
    return {scaled(height), scaled(width)};
}

Frame apply_zoom(const Frame& frame, double f_norm, const OpticsConfig& cfg) {
    const CropDims dims = crop_dims(frame.height(), frame.width(), f_norm, cfg);
    if (dims.height == frame.height() && dims.width == frame.width()) return frame;
    return resize_bilinear(center_crop(frame, dims.width, dims.height), frame.width(), frame.height());
}

std::pair<Frame, DisparityMap> apply_zoom_with_disparity(const Frame& frame, const DisparityMap& disparity,
                                                         double f_norm, const OpticsConfig& cfg) {
    if (frame.width() != disparity.width() || frame.height() != disparity.height()) {
        throw Error(ErrorKind::InvalidArgument, "zoom: disparity dimensions do not match frame");
    }
    const CropDims dims = crop_dims(frame.height(), frame.width(), f_norm, cfg);
    if (dims.height == frame.height() && dims.width == frame.width()) return {frame, disparity};
    Frame zoomed = resize_bilinear(center_crop(frame, dims.width, dims.height), frame.width(), frame.height());
    DisparityMap zd{resize_nearest(center_crop(disparity.values, dims.width, dims.height), frame.width(),
                                   frame.height())};
    return {std::move(zoomed), std::move(zd)};
}

}  // namespace photofx
