#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace photofx {

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Folds a sequence of counters into one stream key. Used wherever randomness
// must be addressable by (seed, frame, pixel, ...) instead of by call order.
inline constexpr std::uint64_t stream_key(std::uint64_t seed,
                                          std::initializer_list<std::uint64_t> counters) noexcept {
    std::uint64_t key = splitmix64_mix(seed + 0x9e3779b97f4a7c15ULL);
    for (std::uint64_t c : counters) {
        key = splitmix64_mix(key ^ (c + 0x9e3779b97f4a7c15ULL));
    }
    return key;
}

/// SplitMix64 as a UniformRandomBitGenerator. Cheap to construct, so one
/// instance per pixel or per RANSAC iteration is fine.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        return splitmix64_mix(state_);
    }

private:
    std::uint64_t state_;
};

/// Uniform double in [0, 1) from the top 53 bits; portable across standard
/// libraries, unlike std::uniform_real_distribution.
template <class Engine>
double unit_uniform(Engine& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

template <class Engine>
double uniform_in(Engine& engine, double lo, double hi) {
    return lo + (hi - lo) * unit_uniform(engine);
}

/// Uniform integer in [0, n) by rejection; n > 0.
template <class Engine>
std::uint64_t uniform_index(Engine& engine, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine();
    while (x >= limit) x = engine();
    return x % n;
}

}  // namespace photofx
