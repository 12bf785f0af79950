#pragma once

#include "photofx/imaging.hpp"

#include <array>

namespace photofx {

struct ColorTempConfig {
    double temp_base = 6500.0;  ///< Kelvin, assumed source white point
    double temp_min = 2000.0;   ///< reached at T = -1
    double temp_max = 10000.0;  ///< reached at T = +1
};

void validate(const ColorTempConfig& cfg);

/// Piecewise-linear map from T in [-1, 1] to Kelvin through temp_base at 0.
double temp_from_control(double T, const ColorTempConfig& cfg = {});

/// Black-body white in 0-255 units, each channel clamped to [0, 255].
/// Formulas are in hundreds of Kelvin (t = temp / 100) with three bands:
/// t <= 66, 66 < t <= 88 (average of the outer two), t > 88.
std::array<double, 3> kelvin_to_rgb(double temp);

/// Per-channel gains RGB(target) / RGB(base).
std::array<double, 3> color_gains(double T, const ColorTempConfig& cfg = {});

/// c' = clamp(c * gain, 0, 1) per channel.
Frame apply_color_temperature(const Frame& frame, double T, const ColorTempConfig& cfg = {});

}  // namespace photofx
