#include "photofx/exposure.hpp"

#include "photofx/error.hpp"
#include "photofx/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace photofx {

void validate(const SensorConfig& cfg) {
    if (!(cfg.fwc > 0.0)) throw Error(ErrorKind::Validation, "sensor: fwc must be positive");
    if (!(cfg.epsilon > 0.0)) throw Error(ErrorKind::Validation, "sensor: epsilon must be positive");
    if (!(cfg.qe > 0.0 && cfg.qe <= 1.0)) throw Error(ErrorKind::Validation, "sensor: qe must lie in (0, 1]");
    if (!(cfg.mu_dark >= 0.0)) throw Error(ErrorKind::Validation, "sensor: mu_dark must be non-negative");
    if (!(cfg.sigma_read >= 0.0)) throw Error(ErrorKind::Validation, "sensor: sigma_read must be non-negative");
}

namespace {

void check_control(double S) {
    if (!(S >= -1.0 && S <= 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "exposure: S = " + std::to_string(S) + " outside [-1, 1]");
    }
}

}  // namespace

double exposure_multiplier(double S, double epsilon) {
    check_control(S);
    return std::exp2(epsilon * S);
}

Frame apply_exposure(const Frame& frame, double S, const SensorConfig& cfg) {
    validate(cfg);
    const double m = exposure_multiplier(S, cfg.epsilon);
    if (S == 0.0) return frame;
    Frame out = frame;
    for (float& v : out.data()) {
        const double electrons = static_cast<double>(v) * cfg.fwc * m;
        v = static_cast<float>(std::min(electrons, cfg.fwc) / cfg.fwc);
    }
    return out;
}

Frame apply_exposure_noisy(const Frame& frame, double S, const SensorConfig& cfg, std::uint64_t seed,
                           std::uint64_t frame_index) {
    validate(cfg);
    const double m = exposure_multiplier(S, cfg.epsilon);
    const double dark = m * cfg.qe * cfg.mu_dark;
    Frame out = frame;
    auto data = out.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        SplitMix64 gen(stream_key(seed, {frame_index, i / 3, i % 3}));
        const double mean = static_cast<double>(data[i]) * cfg.fwc * m + dark;
        double electrons = 0.0;
        if (mean > 0.0) {
            std::poisson_distribution<long long> poisson(mean);
            electrons = static_cast<double>(poisson(gen));
        }
        electrons = std::min(electrons, cfg.fwc);
        if (cfg.sigma_read > 0.0) {
            std::normal_distribution<double> read(0.0, cfg.sigma_read);
            electrons += read(gen);
        }
        data[i] = static_cast<float>(std::clamp(electrons / cfg.fwc, 0.0, 1.0));
    }
    return out;
}

}  // namespace photofx
