#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace solarcast {

/// SplitMix64 finalizer; derives independent sub-seeds from a master seed.
inline constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seeded generator with draw rules spelled out here rather than left to
/// the standard library's implementation-defined distributions, so streams
/// are reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1].
    double uniform() noexcept { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), by rejection. bound > 0.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t draw;
        do draw = engine_();
        while (draw >= limit);
        return draw % bound;
    }

    /// Standard normal via Box-Muller.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace solarcast
