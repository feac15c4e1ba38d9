#pragma once

#include "solarcast/error.hpp"
#include "solarcast/format.hpp"
#include "solarcast/series.hpp"
#include "solarcast/solar_geometry.hpp"
#include "solarcast/time.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace solarcast {

/// Bird model atmospheric inputs. Defaults are the standard Bird reference
/// atmosphere.
struct AtmosphereParams {
    double ozone_atm_cm = 0.3;
    double precipitable_water_cm = 1.5;
    double aod_380nm = 0.15;
    double aod_500nm = 0.1;
    double ground_albedo = 0.2;
    double pressure_hpa = kStandardPressure;
    double forward_scatter = 0.84;
};

/// Site coordinates plus the static atmospheric inputs of the Bird model.
class SiteAtmosphere {
public:
    using Params = AtmosphereParams;

    explicit SiteAtmosphere(GeoLocation location, Params params = {}) : location_(location), p_(params) {
        detail::require(p_.ozone_atm_cm > 0.0, "ozone must be positive");
        detail::require(p_.precipitable_water_cm > 0.0, "precipitable water must be positive");
        detail::require(p_.aod_380nm >= 0.0, "aerosol optical depth at 380 nm must be non-negative");
        detail::require(p_.aod_500nm >= 0.0, "aerosol optical depth at 500 nm must be non-negative");
        detail::require(p_.ground_albedo >= 0.0 && p_.ground_albedo <= 1.0, "ground albedo must be within [0, 1]");
        detail::require(p_.pressure_hpa >= 300.0 && p_.pressure_hpa <= 1100.0,
                        "pressure must be within [300, 1100] hPa");
        detail::require(p_.forward_scatter > 0.0 && p_.forward_scatter <= 1.0,
                        "forward scatter must be within (0, 1]");
    }

    const GeoLocation& location() const noexcept { return location_; }
    const Params& params() const noexcept { return p_; }
    double ozone() const noexcept { return p_.ozone_atm_cm; }
    double precipitable_water() const noexcept { return p_.precipitable_water_cm; }
    double aod_380nm() const noexcept { return p_.aod_380nm; }
    double aod_500nm() const noexcept { return p_.aod_500nm; }
    double ground_albedo() const noexcept { return p_.ground_albedo; }
    double pressure() const noexcept { return p_.pressure_hpa; }
    double forward_scatter() const noexcept { return p_.forward_scatter; }

private:
    GeoLocation location_;
    Params p_;
};

/// Intermediate and final quantities of one Bird evaluation. Irradiances
/// are on a horizontal surface.
struct BirdComponents {
    double direct = 0.0;     ///< φ_d, W/m²
    double scattered = 0.0;  ///< φ_l, W/m²
    double total = 0.0;      ///< φ_s, W/m²
    double atmospheric_albedo = 0.0;  ///< r_s
    double t_rayleigh = 1.0;
    double t_ozone = 1.0;
    double t_mixed_gases = 1.0;
    double t_water = 1.0;
    double t_aerosol = 1.0;
    double t_aerosol_absorption = 1.0;
    double extraterrestrial = 0.0;  ///< normal incidence, W/m²
    double cos_zenith = 0.0;
    double air_mass = 0.0;           ///< relative
    double air_mass_pressure = 0.0;  ///< pressure corrected
};

namespace detail {

// The empirical transmittance fits leave [0, 1] slightly at grazing sun
// (air mass above ~27, zenith beyond ~88°); they are clamped there.
inline double checked_unit(double value, const char* name) {
    if (!std::isfinite(value)) throw Error(ErrorKind::numeric_domain, std::string(name) + " is not finite");
    return std::clamp(value, 0.0, 1.0);
}

} // namespace detail

/// Bird & Hulstrom (1981) broadband clear-sky model for a given zenith angle
/// and extraterrestrial irradiance. nullopt means the sun is below the horizon.
inline std::optional<BirdComponents> bird_components_at(const SiteAtmosphere& atm, double zenith_deg,
                                                        double extraterrestrial) {
    const auto am_opt = relative_air_mass(zenith_deg);
    if (!am_opt) return std::nullopt;
    const double am = *am_opt;
    const double amp = am * atm.pressure() / kStandardPressure;

    BirdComponents c;
    c.extraterrestrial = extraterrestrial;
    c.cos_zenith = std::cos(detail::deg2rad(zenith_deg));
    c.air_mass = am;
    c.air_mass_pressure = amp;

    c.t_rayleigh = detail::checked_unit(std::exp(-0.0903 * std::pow(amp, 0.84) * (1.0 + amp - std::pow(amp, 1.01))),
                                        "Rayleigh transmittance");
    const double ozone_path = atm.ozone() * am;
    c.t_ozone = detail::checked_unit(
        1.0 - 0.1611 * ozone_path * std::pow(1.0 + 139.48 * ozone_path, -0.3034) -
            0.002715 * ozone_path / (1.0 + 0.044 * ozone_path + 0.0003 * ozone_path * ozone_path),
        "ozone transmittance");
    c.t_mixed_gases = detail::checked_unit(std::exp(-0.0127 * std::pow(amp, 0.26)), "mixed gas transmittance");
    const double water_path = atm.precipitable_water() * am;
    c.t_water = detail::checked_unit(
        1.0 - 2.4959 * water_path / (std::pow(1.0 + 79.034 * water_path, 0.6828) + 6.385 * water_path),
        "water vapor transmittance");
    const double tau = 0.2758 * atm.aod_380nm() + 0.35 * atm.aod_500nm();
    c.t_aerosol = detail::checked_unit(
        std::exp(-std::pow(tau, 0.873) * (1.0 + tau - std::pow(tau, 0.7088)) * std::pow(am, 0.9108)),
        "aerosol transmittance");
    c.t_aerosol_absorption = detail::checked_unit(1.0 - 0.1 * (1.0 - am + std::pow(am, 1.06)) * (1.0 - c.t_aerosol),
                                                  "aerosol absorption transmittance");
    // Absorption alone never transmits less than absorption plus scattering.
    const double aerosol_ratio = detail::checked_unit(c.t_aerosol / c.t_aerosol_absorption, "aerosol ratio");
    c.atmospheric_albedo = 0.0685 + (1.0 - atm.forward_scatter()) * (1.0 - aerosol_ratio);

    const double horizontal_etr = extraterrestrial * c.cos_zenith;
    c.direct = 0.9662 * horizontal_etr * c.t_aerosol * c.t_water * c.t_mixed_gases * c.t_ozone * c.t_rayleigh;
    c.scattered = 0.79 * horizontal_etr * c.t_aerosol_absorption * c.t_water * c.t_mixed_gases * c.t_ozone *
                  (0.5 * (1.0 - c.t_rayleigh) + atm.forward_scatter() * (1.0 - aerosol_ratio)) /
                  (1.0 - am + std::pow(am, 1.02));
    c.total = (c.direct + c.scattered) / (1.0 - atm.ground_albedo() * c.atmospheric_albedo);
    return c;
}

inline std::optional<BirdComponents> bird_components(const SiteAtmosphere& atm, Timestamp t) {
    const auto pos = sun_position(atm.location(), t);
    return bird_components_at(atm, pos.zenith, kSolarConstant * pos.earth_sun_distance_factor);
}

/// Bird clear-sky GHI on a regular grid; night samples are 0 and valid.
inline IrradianceSeries clear_sky_series(const SiteAtmosphere& atm, Timestamp start, std::int64_t step_seconds,
                                         std::size_t n) {
    detail::require(n >= 1, "clear-sky series needs at least one sample");
    detail::require(step_seconds > 0, "series step must be positive");
    std::vector<double> values(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (const auto c = bird_components(atm, start + static_cast<std::int64_t>(i) * step_seconds)) values[i] = c->total;
    }
    return IrradianceSeries(start, step_seconds, std::move(values));
}

inline constexpr double kNightThreshold = 20.0;  // W/m²
inline constexpr double kMaxClearness = 1.5;
inline constexpr double kNightClearness = 1.0;

/// Per-sample clearness index with a validity mask. Masked samples hold
/// the neutral placeholder 1.0.
class ClearnessSeries {
public:
    ClearnessSeries(Timestamp start, std::int64_t step_seconds, std::vector<double> k, std::vector<bool> mask)
        : start_(start), step_(step_seconds), k_(std::move(k)), mask_(std::move(mask)) {
        detail::require(step_ > 0, "series step must be positive");
        detail::require(k_.size() == mask_.size(), "k and mask lengths differ");
        for (std::size_t i = 0; i < k_.size(); ++i) {
            if (!mask_[i]) {
                k_[i] = kNightClearness;
                continue;
            }
            detail::require(std::isfinite(k_[i]) && k_[i] >= 0.0 && k_[i] <= kMaxClearness,
                            "clearness index outside [0, 1.5] at index " + std::to_string(i));
        }
    }

    ClearnessSeries(Timestamp start, std::int64_t step_seconds, std::vector<double> k)
        : ClearnessSeries(start, step_seconds, k, std::vector<bool>(k.size(), true)) {}

    Timestamp start() const noexcept { return start_; }
    std::int64_t step() const noexcept { return step_; }
    std::size_t size() const noexcept { return k_.size(); }
    const std::vector<double>& k() const noexcept { return k_; }
    const std::vector<bool>& mask() const noexcept { return mask_; }
    double k_at(std::size_t i) const { return k_.at(i); }
    bool is_valid(std::size_t i) const { return mask_.at(i); }
    Timestamp time_at(std::size_t i) const noexcept { return start_ + static_cast<std::int64_t>(i) * step_; }

    std::size_t valid_count() const noexcept {
        std::size_t n = 0;
        for (bool v : mask_) n += v;
        return n;
    }

    ClearnessSeries slice(std::size_t first, std::size_t count) const {
        detail::require(first + count <= size(), "slice out of range");
        return ClearnessSeries(time_at(first), step_,
                               std::vector<double>(k_.begin() + first, k_.begin() + first + count),
                               std::vector<bool>(mask_.begin() + first, mask_.begin() + first + count));
    }

    friend bool operator==(const ClearnessSeries&, const ClearnessSeries&) = default;

private:
    Timestamp start_;
    std::int64_t step_;
    std::vector<double> k_;
    std::vector<bool> mask_;
};

namespace detail {

inline void require_aligned(const IrradianceSeries& a, const IrradianceSeries& b) {
    if (a.start() != b.start() || a.step() != b.step() || a.size() != b.size())
        throw Error(ErrorKind::alignment, "measured and clear-sky series differ in start, step or length");
}

} // namespace detail

/// k = measured / clear-sky, clamped to [0, 1.5]. Samples with clear-sky
/// below 20 W/m² or an invalid measurement are masked.
inline ClearnessSeries clearness_index(const IrradianceSeries& measured, const IrradianceSeries& clear) {
    detail::require_aligned(measured, clear);
    std::vector<double> k(measured.size(), kNightClearness);
    std::vector<bool> mask(measured.size(), false);
    for (std::size_t i = 0; i < measured.size(); ++i) {
        const double cs = clear.value(i);
        if (!clear.is_valid(i) || !measured.is_valid(i) || cs < kNightThreshold) continue;
        k[i] = std::clamp(measured.value(i) / cs, 0.0, kMaxClearness);
        mask[i] = true;
    }
    return ClearnessSeries(measured.start(), measured.step(), std::move(k), std::move(mask));
}

/// Pearson correlation between measured and clear-sky irradiance, pooled
/// over the daytime samples of the listed UTC calendar days.
inline double clear_day_correlation(const IrradianceSeries& measured, const IrradianceSeries& clear,
                                    const std::vector<std::chrono::year_month_day>& days) {
    detail::require_aligned(measured, clear);
    detail::require(!days.empty(), "at least one clear day is required");
    std::vector<double> xs, ys;
    for (const auto& day : days) {
        detail::require(day.ok(), "invalid calendar day");
        const Timestamp day_start{std::chrono::sys_seconds{std::chrono::sys_days{day}}};
        const Timestamp day_end = day_start + 86400;
        if (day_start < measured.start() || measured.end() < day_end)
            throw Error(ErrorKind::insufficient_data, "day " + day_start.iso8601().substr(0, 10) +
                                                          " is not fully covered by the series");
        const auto first = static_cast<std::size_t>((day_start - measured.start() + measured.step() - 1) /
                                                    measured.step());
        for (std::size_t i = first; i < measured.size() && measured.time_at(i) < day_end; ++i) {
            if (!measured.is_valid(i) || !clear.is_valid(i) || clear.value(i) < kNightThreshold) continue;
            xs.push_back(measured.value(i));
            ys.push_back(clear.value(i));
        }
    }
    if (xs.size() < 3) throw Error(ErrorKind::insufficient_data, "fewer than 3 daytime samples on the listed days");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::numeric_domain, "zero variance; correlation undefined");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Site configuration file: `key=value` lines, '#' comments.
//
//   latitude=52.09              degrees north, required
//   longitude=5.12              degrees east, required
//   elevation_m=0               meters
//   ozone_atm_cm=0.3            atm-cm
//   precipitable_water_cm=1.5   cm
//   aod_380nm=0.15
//   aod_500nm=0.1
//   ground_albedo=0.2
//   pressure_hpa=1013.25        hPa
//   forward_scatter=0.84

inline SiteAtmosphere parse_site_config(std::istream& in) {
    std::map<std::string, double> kv;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = detail::trim_line(raw);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw Error(ErrorKind::validation, "expected key=value", line_no);
        std::string key(line.substr(0, eq));
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        static const char* const known[] = {"latitude",      "longitude",     "elevation_m",
                                            "ozone_atm_cm",  "precipitable_water_cm",
                                            "aod_380nm",     "aod_500nm",     "ground_albedo",
                                            "pressure_hpa",  "forward_scatter"};
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            throw Error(ErrorKind::validation, "unknown site key '" + key + "'", line_no);
        const auto value = parse_double(line.substr(eq + 1));
        if (!value || !std::isfinite(*value))
            throw Error(ErrorKind::validation, "malformed value for '" + key + "'", line_no);
        if (!kv.emplace(key, *value).second)
            throw Error(ErrorKind::validation, "duplicate site key '" + key + "'", line_no);
    }
    if (!kv.contains("latitude") || !kv.contains("longitude"))
        throw Error(ErrorKind::validation, "site config must set latitude and longitude");

    auto get = [&](const char* key, double fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    };
    SiteAtmosphere::Params p;
    p.ozone_atm_cm = get("ozone_atm_cm", p.ozone_atm_cm);
    p.precipitable_water_cm = get("precipitable_water_cm", p.precipitable_water_cm);
    p.aod_380nm = get("aod_380nm", p.aod_380nm);
    p.aod_500nm = get("aod_500nm", p.aod_500nm);
    p.ground_albedo = get("ground_albedo", p.ground_albedo);
    p.pressure_hpa = get("pressure_hpa", p.pressure_hpa);
    p.forward_scatter = get("forward_scatter", p.forward_scatter);
    return SiteAtmosphere(GeoLocation(kv.at("latitude"), kv.at("longitude"), get("elevation_m", 0.0)), p);
}

inline SiteAtmosphere parse_site_config(const std::string& text) {
    std::istringstream in(text);
    return parse_site_config(in);
}

/// Key/value pairs in config-file order, for echoing into output metadata.
inline std::vector<std::pair<std::string, std::string>> site_metadata(const SiteAtmosphere& atm) {
    const auto& p = atm.params();
    return {
        {"latitude", format_double(atm.location().latitude())},
        {"longitude", format_double(atm.location().longitude())},
        {"elevation_m", format_double(atm.location().elevation())},
        {"ozone_atm_cm", format_double(p.ozone_atm_cm)},
        {"precipitable_water_cm", format_double(p.precipitable_water_cm)},
        {"aod_380nm", format_double(p.aod_380nm)},
        {"aod_500nm", format_double(p.aod_500nm)},
        {"ground_albedo", format_double(p.ground_albedo)},
        {"pressure_hpa", format_double(p.pressure_hpa)},
        {"forward_scatter", format_double(p.forward_scatter)},
    };
}

inline void write_site_config(std::ostream& out, const SiteAtmosphere& atm) {
    for (const auto& [key, value] : site_metadata(atm)) out << key << '=' << value << '\n';
}

} // namespace solarcast
