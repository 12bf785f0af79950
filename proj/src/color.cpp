#include "photofx/color.hpp"

#include "photofx/error.hpp"

#include <algorithm>
#include <cmath>

namespace photofx {

namespace {

// Fitted black-body constants, hundreds-of-Kelvin parameterization.
constexpr double kGreenLogScale = 99.47;
constexpr double kGreenLogOffset = 161.12;
constexpr double kBlueLogScale = 138.52;
constexpr double kBlueLogOffset = 305.04;
constexpr double kRedPowScale = 329.07;
constexpr double kRedPowExp = -0.1933;
constexpr double kGreenPowScale = 288.12;
constexpr double kGreenPowExp = -0.1155;

}  // namespace

void validate(const ColorTempConfig& cfg) {
    if (!(cfg.temp_min < cfg.temp_base && cfg.temp_base < cfg.temp_max)) {
        throw Error(ErrorKind::Validation, "color: need temp_min < temp_base < temp_max");
    }
    if (cfg.temp_min < 2000.0 || cfg.temp_max > 10000.0) {
        throw Error(ErrorKind::Validation, "color: temperature range must lie within [2000, 10000] K");
    }
}

double temp_from_control(double T, const ColorTempConfig& cfg) {
    if (!(T >= -1.0 && T <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "color: T = " + std::to_string(T) + " outside [-1, 1]");
    }
    validate(cfg);
    if (T < 0.0) return cfg.temp_base + (cfg.temp_base - cfg.temp_min) * T;
    return cfg.temp_base + (cfg.temp_max - cfg.temp_base) * T;
}

std::array<double, 3> kelvin_to_rgb(double temp) {
    if (!(temp >= 2000.0 && temp <= 10000.0)) {
        throw Error(ErrorKind::InvalidArgument, "color: temperature " + std::to_string(temp) +
                                                    " K outside [2000, 10000]");
    }
    const double t = temp / 100.0;
    const double g_log = kGreenLogScale * std::log(t) - kGreenLogOffset;
    const double b_log = kBlueLogScale * std::log(t - 10.0) - kBlueLogOffset;
    const double r_pow = kRedPowScale * std::pow(t - 60.0 > 0.0 ? t - 60.0 : 1.0, kRedPowExp);
    const double g_pow = kGreenPowScale * std::pow(t - 60.0 > 0.0 ? t - 60.0 : 1.0, kGreenPowExp);

    std::array<double, 3> rgb{};
    if (t <= 66.0) {
        rgb = {255.0, std::max(0.0, g_log), std::max(0.0, b_log)};
    } else if (t <= 88.0) {
        rgb = {0.5 * (255.0 + r_pow), 0.5 * (g_pow + g_log), 0.5 * (b_log + 255.0)};
    } else {
        rgb = {r_pow, g_pow, 255.0};
    }
    for (double& c : rgb) c = std::clamp(c, 0.0, 255.0);
    return rgb;
}

std::array<double, 3> color_gains(double T, const ColorTempConfig& cfg) {
    const auto base = kelvin_to_rgb(temp_from_control(0.0, cfg));
    const auto target = kelvin_to_rgb(temp_from_control(T, cfg));
    std::array<double, 3> gains{};
    for (std::size_t c = 0; c < 3; ++c) {
        if (!(base[c] > 0.0)) {
            throw Error(ErrorKind::InvalidArgument, "color: base temperature has a zero channel");
        }
        gains[c] = target[c] / base[c];
    }
    return gains;
}

Frame apply_color_temperature(const Frame& frame, double T, const ColorTempConfig& cfg) {
    const auto gains = color_gains(T, cfg);
    if (T == 0.0) return frame;
    Frame out = frame;
    auto data = out.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] = static_cast<float>(std::clamp(static_cast<double>(data[i]) * gains[i % 3], 0.0, 1.0));
    }
    return out;
}

}  // namespace photofx
