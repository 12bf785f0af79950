#pragma once

#include "photofx/imaging.hpp"

#include <cstdint>

namespace photofx {

// Image-sensor model. Pixel values are read as a fraction of the full well,
// so the conversion gain and ADC map fwc electrons to full scale.
struct SensorConfig {
    double fwc = 10000.0;     ///< full-well capacity, electrons
    double epsilon = 3.0;     ///< stops per unit of shutter control
    double qe = 0.6;          ///< quantum efficiency (noisy path only)
    double mu_dark = 0.0;     ///< dark signal, electrons before QE (noisy path only)
    double sigma_read = 2.0;  ///< read noise std-dev, electrons (noisy path only)
};

void validate(const SensorConfig& cfg);

/// M(S) = 2^(epsilon S).
double exposure_multiplier(double S, double epsilon);

/// E_t = c fwc M(S), clipped at fwc, returned as E_t / fwc.
Frame apply_exposure(const Frame& frame, double S, const SensorConfig& cfg = {});

/// Stochastic sensor path. Collected electrons n ~ Poisson(E_t + M(S) qe mu_dark),
/// clipped at fwc, plus N(0, sigma_read^2) read noise, divided by fwc and
/// clamped to [0, 1]. Each sample draws from its own generator keyed by
/// (seed, frame_index, pixel, channel), so results do not depend on
/// evaluation order.
Frame apply_exposure_noisy(const Frame& frame, double S, const SensorConfig& cfg, std::uint64_t seed,
                           std::uint64_t frame_index = 0);

}  // namespace photofx
