#pragma once

#include "solarcast/clear_sky.hpp"
#include "solarcast/error.hpp"
#include "solarcast/random.hpp"
#include "solarcast/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace solarcast {

struct SynthConfig {
    SiteAtmosphere site;
    int year = 2015;
    std::int64_t step = 300;        // seconds
    double cloud_persistence = 0.9;  // AR(1) coefficient per step, (0, 1)
    double cloud_depth = 0.6;        // [0, 1]
    std::uint64_t seed = 0;

    void validate() const {
        detail::require(year >= 1900 && year <= 2100, "synthetic year must be within 1900-2100");
        detail::require(step > 0 && step <= 86400, "synthetic step must be within (0, 86400] seconds");
        detail::require(cloud_persistence > 0.0 && cloud_persistence < 1.0, "cloud persistence must be within (0, 1)");
        detail::require(cloud_depth >= 0.0 && cloud_depth <= 1.0, "cloud depth must be within [0, 1]");
    }
};

/// Maps the unit-variance latent cloud state onto the multiplicative factor.
/// x = 1 is clear sky; larger x produces brief enhancement up to 1.1, and
/// x ≤ -1 is the deepest cloud cover.
inline double cloud_factor(double latent, double depth) noexcept {
    return std::clamp(1.0 - depth * (1.0 - latent) / 2.0, 1.0 - depth, 1.1);
}

/// One calendar year of synthetic GHI: Bird clear-sky times a cloud factor
/// driven by the stationary AR(1) x' = φ·x + sqrt(1 − φ²)·ε.
inline IrradianceSeries synthesize_year(const SynthConfig& config) {
    config.validate();
    const Timestamp start = Timestamp::from_civil(config.year, 1, 1);
    const Timestamp end = Timestamp::from_civil(config.year + 1, 1, 1);
    const auto n = static_cast<std::size_t>((end - start) / config.step);

    Rng rng(config.seed);
    const double phi = config.cloud_persistence;
    const double innovation_scale = std::sqrt(1.0 - phi * phi);
    double latent = rng.normal();

    std::vector<double> values(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) latent = phi * latent + innovation_scale * rng.normal();
        if (const auto c = bird_components(config.site, start + static_cast<std::int64_t>(i) * config.step))
            values[i] = c->total * cloud_factor(latent, config.cloud_depth);
    }
    return IrradianceSeries(start, config.step, std::move(values));
}

} // namespace solarcast
