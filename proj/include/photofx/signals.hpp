#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace photofx {

/// Photographic control for one frame. K, d_f and f live in [0, 1];
/// S and T are relative adjustments in [-1, 1].
struct PhotoParams {
    double K = 0.0;    ///< bokeh blur strength
    double d_f = 0.0;  ///< refocused disparity (focal plane)
    double f = 0.0;    ///< focal length, 0 = source lens
    double S = 0.0;    ///< shutter / exposure
    double T = 0.0;    ///< colour temperature, negative = warmer

    bool operator==(const PhotoParams&) const = default;
};

/// Throws Validation naming the first out-of-range field.
void validate(const PhotoParams& params);

struct PhotoSignal {
    std::vector<PhotoParams> per_frame;

    std::size_t size() const noexcept { return per_frame.size(); }
    const PhotoParams& operator[](std::size_t i) const { return per_frame[i]; }

    bool operator==(const PhotoSignal&) const = default;
};

/// Row-major 3x4 camera extrinsic [R | t].
using Extrinsic = std::array<double, 12>;

struct TrajSignal {
    std::vector<Extrinsic> per_frame;

    std::size_t size() const noexcept { return per_frame.size(); }

    bool operator==(const TrajSignal&) const = default;
};

// Error messages name the frame index and field, e.g. "frame 3: K = 1.2
// outside [0, 1]".
void validate(const PhotoSignal& signal);
void validate(const TrajSignal& signal);

TrajSignal identity_traj(std::size_t frames);

PhotoSignal constant_signal(const PhotoParams& params, std::size_t frames);

/// Componentwise linear schedule; frame 0 is `start`, frame n-1 is `end`.
PhotoSignal ramp_signal(const PhotoParams& start, const PhotoParams& end, std::size_t frames);

/// Contents of a signal file.
struct ControlSignals {
    PhotoSignal photo;
    std::optional<TrajSignal> trajectory;

    bool operator==(const ControlSignals&) const = default;
};

// Signal files are JSON objects with keys K, d_f, f, S, T. Each is either a
// scalar (broadcast to every frame) or an array with one entry per frame.
// An optional "frames" key fixes the length when every field is scalar, and
// an optional "trajectory" holds one 12-element row-major [R|t] per frame.
// Numbers may also be given as numeric strings.
std::string serialize(const PhotoSignal& signal, const std::optional<TrajSignal>& trajectory = std::nullopt);
ControlSignals deserialize(std::string_view text);

ControlSignals load_signal_file(const std::string& path);

}  // namespace photofx
