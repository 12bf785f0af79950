#pragma once

// Straightforward reference implementations used as test oracles. They
// favour obviousness over speed and share no code with the library.

#include "photofx/imaging.hpp"

#include <vector>

namespace oracle {

using Mat = std::vector<std::vector<double>>;  // row-major, rows x cols

/// Scatter bokeh by brute force: every (source, target) pixel pair is
/// tested against the source disk, layers composited far to near.
photofx::Frame bokeh(const photofx::Frame& frame, const photofx::DisparityMap& disparity, double K, double d_f,
                      int layers = 8);

/// Bilinear resize with half-pixel centres, written per output pixel.
photofx::Frame bilinear(const photofx::Frame& frame, int width, int height);

/// Two-pass Pearson correlation over all samples of two frames.
double pearson(const photofx::Frame& a, const photofx::Frame& b);

Mat matmul(const Mat& a, const Mat& b);

/// RoPE using complex multiplication of feature pairs.
Mat rope(const Mat& x, const std::vector<double>& positions, double base = 10000.0);

struct AttnWeights {
    Mat wq, wk_traj, wv_traj, wk_pho, wv_pho, wo;
    int heads;
};

/// Decoupled cross-attention forward pass with explicit loops.
Mat decoupled_attention(const Mat& tokens, const std::vector<double>& positions, const Mat& traj, const Mat& pho,
                        const AttnWeights& w);

}  // namespace oracle
