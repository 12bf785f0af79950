#pragma once

#include "photofx/imaging.hpp"
#include "photofx/signals.hpp"

#include <vector>

namespace photofx {

/// Physical blur range: the normalized control K in [0, 1] scales to
/// [0, 60] pixels of CoC radius per unit disparity offset.
inline constexpr double kMaxCocRadius = 60.0;

struct BokehConfig {
    int layers = 8;  ///< uniform disparity bins for occlusion compositing
};

/// Per-pixel circle-of-confusion radius in pixels.
struct CocMap {
    int width = 0;
    int height = 0;
    std::vector<double> radius;

    double at(int x, int y) const noexcept {
        return radius[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
    }
};

/// r = 60 K |d - d_f| for every pixel.
CocMap coc_map(const DisparityMap& disparity, double K, double d_f);

/// Layer index of a disparity value: min(floor(d * layers), layers - 1).
int bokeh_layer(double disparity, int layers) noexcept;

/// Number of integer offsets (dx, dy) with dx^2 + dy^2 <= r^2. Radii below
/// 0.5 give the single centre pixel.
long disk_area(double radius) noexcept;

// Scatter renderer. Every source pixel spreads its colour uniformly over the
// integer-offset disk of its CoC radius, each covered pixel receiving weight
// 1 / disk_area (disks are clipped at the frame border after the area is
// fixed). Pixels are grouped into disparity layers and composited far to
// near: at each pixel the new layer's accumulated weight, capped at 1, is the
// fraction of everything behind it that it hides. Output is accumulated
// colour over accumulated weight.
Frame render_bokeh(const Frame& frame, const DisparityMap& disparity, double K, double d_f,
                   const BokehConfig& cfg = {});

VideoClip render_bokeh_clip(const VideoClip& clip, const std::vector<DisparityMap>& disparities,
                            const PhotoSignal& signal, const BokehConfig& cfg = {}, unsigned workers = 1);

}  // namespace photofx
